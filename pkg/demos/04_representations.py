# Base-N representations: for the Lebesgue-type family with N=3, the squared
# weights of all representations of each integer add up to one.
# %%
from fracframes.candidate import make_integer_base_family
from fracframes.verify import enumerate_representations, level_k_parseval

fam = make_integer_base_family(3, [[0, 3], [-1]])
print("labels", fam.labels_1d, "squared weights", fam.alpha_sq_exact)

# %% a few integers; -5 has infinitely many representations
for n in (0, 1, 2, -5, 17):
    r = enumerate_representations(fam, n, max_len=8)
    print(n, "total", r.total, "complete" if r.complete else "truncated",
          r.words[:4], "...")

# %% the identity for |n| <= 50
print(all(enumerate_representations(fam, n).total == 1 for n in range(-50, 51)))

# %% outside the family the identity fails: 15 = 3 + 4*3 in base 4
from fracframes import ExactWeight, new_candidate
h = ExactWeight.sqrt_recip(2)
quarter = new_candidate(([[4]], [0, 2]), [0, 3, 9], [1, h, h])
print(enumerate_representations(quarter, 15))

# %% finite levels are exactly Parseval
for k in range(1, 4):
    print(level_k_parseval(quarter, k))
