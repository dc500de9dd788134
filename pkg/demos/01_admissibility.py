# Admissibility of a weighted label set: the isometry test and its two
# equivalent forms, on the quarter Cantor measure (R=4, B={0,2}).
# %%
import numpy as np

from fracframes import ExactWeight, new_candidate
from fracframes.candidate import (check_isometry, check_parseval_on_delta,
                                  check_two_digit_family, check_vanishing_sums,
                                  congruence_report, frame_matrix, transfer_operator)

h = ExactWeight.sqrt_recip(2)
c = new_candidate(([[4]], [0, 2]), [0, 3, 9], [1, h, h])

# %% the M x N matrix T; isometry means T*T = I
T = frame_matrix(c)
print(np.round(T, 4))
print("T*T =", np.round(T.conj().T @ T, 12))
print("isometry:", check_isometry(c))

# %% the same condition seen two other ways
print("Parseval on the level-one atoms:", check_parseval_on_delta(c))
pts = np.linspace(-3, 3, 7).reshape(-1, 1)
print("transfer operator applied to 1:", transfer_operator(c, lambda y: np.ones(len(y)))(pts))

# %% necessary conditions: residue classes and vanishing digit sums
print(congruence_report(c))
print("vanishing sums ok:", check_vanishing_sums(c).ok)
print("two-digit family:", check_two_digit_family(c).conditions)

# %% equal weights break it
bad = new_candidate(([[4]], [0, 2]), [0, 3, 9], [1, 1, 1])
print("equal weights:", check_isometry(bad).ok, check_two_digit_family(bad).conditions["iv"])

# %% the middle-third Cantor measure admits no nonzero label at all
mid = new_candidate(([[3]], [0, 2]), [0, 1], [1, 1])
print("middle third, any label possible:", check_vanishing_sums(mid).any_label_possible)
