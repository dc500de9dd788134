# Dilation to a Hadamard-type system: pad the frame matrix, complete it to a
# unitary, and read the filter matrix a; word projections recover the frame.
# %%
import numpy as np

from fracframes import ExactWeight, new_candidate
from fracframes.dilation import (build_a_matrix, build_dilation, complete_to_unitary,
                                 partition_of_unity, project_cuntz_word,
                                 projected_frame_check)

h = ExactWeight.sqrt_recip(2)
c = new_candidate(([[4]], [0, 2]), [0, 3, 9], [1, h, h])
D = build_dilation(c)
print("aux N' =", D.aux_N, " size =", D.size)
print("positions:", D.positions)
print("padded weights:", np.round(D.padded_alphas, 4))

# %% unitary completion
comp = complete_to_unitary(D)
print(np.round(comp.s, 4))

# %% the a-matrix: unitary, first row of ones, row means give the weights
a = build_a_matrix(D)
print(np.round(a.values, 4))
print("unitarity deviation", a.unitarity_deviation)
print("row means", np.round(a.row_means[:, 0], 12))

# %% word projections: frequency 3 + 4*9 = 39 with coefficient 1/2
wp = project_cuntz_word(D, [D.position_of(3), D.position_of(9)], a=a)
print(wp)

# %% partition of unity and the projected level-3 frame
print(partition_of_unity(D, 0.37))
print(projected_frame_check(D, 3, a))
