"""Weighted Fourier frames on self-affine measures.

Exact arithmetic for integer matrices and roots of unity, the affine IFS and
its Fourier transform, admissibility checks for candidate frames, the
one-dimensional transition dynamics deciding completeness, a dilation
construction, and finite-level verification routines.
"""

from .candidate import (DEFAULT_TOL, ExactWeight, FrameCandidate,
                        atomic_frame_operator, check_isometry,
                        check_parseval_on_delta, check_three_digit_family,
                        check_two_digit_family, check_vanishing_sums,
                        congruence_report, frame_matrix,
                        make_integer_base_family, new_candidate,
                        transfer_apply, transfer_operator)
from .dilation import (build_a_matrix, build_dilation, complete_to_unitary,
                       cuntz_filter_matrix, project_cuntz_word)
from .dynamics import (completeness_verdict, extreme_cycles,
                       find_minimal_invariant_sets, transition_targets)
from .errors import *  # noqa: F401,F403
from .exact import IntMatrix, cyclo_is_zero, is_expansive, phases_vanish
from .ifs import (AtomicMeasure, IfsSystem, fourier_transform,
                  fourier_vanishes_exact, level_measure, mask, new_ifs)
from .io import load_candidate, parse_candidate
from .verify import (bessel_partial_sum, enumerate_representations,
                     frequency_words, level_k_parseval, orthogonality_witness)

__version__ = "0.1.0"
