# Completeness in dimension one: minimal invariant sets of the transition
# dynamics decide between a Parseval frame and an incomplete family.
# %%
from fracframes import ExactWeight, new_candidate
from fracframes.dynamics import (candidate_points, completeness_verdict, extreme_cycles,
                                 find_minimal_invariant_sets)
from fracframes.verify import orthogonality_witness

h = ExactWeight.sqrt_recip(2)
good = new_candidate(([[4]], [0, 2]), [0, 3, 9], [1, h, h])
bad = new_candidate(([[4]], [0, 2]), [0, 3, 15], [1, h, h])

# %% candidate points are a finite window of (1/gcd B) Z
print(candidate_points(good))

# %% only {0} survives for {0,3,9}
v = completeness_verdict(good)
print(v.status, v.report.minimal_sets)

# %% {0,3,15} has the extra invariant cycle -1 -> -1, -1 -> -4 -> -1
v = completeness_verdict(bad)
print(v.status, v.report.minimal_sets, "witness", v.witness)
print(v.certificate)
for e in v.report.transitions:
    print(f"  {e.source} --{e.label}--> {e.target}  (weight {e.weight:.3f})")

# %% e_{-1} is orthogonal to every frame vector, certified by exact zeros
print("e_-1 orthogonal up to word length 4:", orthogonality_witness(bad, -1, 4, 8))

# %% extreme cycles of the binary example with labels {0,1,3}
c2 = new_candidate(([[2]], [0, 1]), [0, 1, 3], [1, h, h])
for z in extreme_cycles(c2):
    print(z)
print(find_minimal_invariant_sets(c2).graph.to_dot())
