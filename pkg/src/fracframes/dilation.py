"""Dilation of the frame to an orthonormal set built from a Cuntz family.

The labels are embedded into ``B x B'`` for an auxiliary digit set
``B' = {0, ..., N'-1}``; the padded frame matrix is completed to a unitary,
from which the coefficient matrix ``a`` of the filters is read off.  The
functions here rebuild the frame vectors from that data and serve as an
independent check on the closed-form frequencies and weights.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .candidate import DEFAULT_TOL, FrameCandidate, check_isometry
from .errors import CandidateError, IsometryError
from .exact import IntVec, RatVec, as_int_vector, dot, unit
from .ifs import mask_array

PIVOT_THRESHOLD = 1e-8


@dataclass(frozen=True)
class DilationSystem:
    base: FrameCandidate
    aux_N: int
    aux_R: int
    positions: tuple[tuple[IntVec, int], ...]  # lexicographic B x B'
    embed: dict  # label index -> position index

    @property
    def size(self) -> int:
        return len(self.positions)

    @property
    def aux_B(self) -> tuple[int, ...]:
        return tuple(range(self.aux_N))

    @cached_property
    def padded_labels(self) -> tuple[IntVec, ...]:
        zero = (0,) * self.base.d
        out = [zero] * self.size
        for i, p in self.embed.items():
            out[p] = self.base.L[i]
        return tuple(out)

    @cached_property
    def padded_alphas(self) -> np.ndarray:
        out = np.zeros(self.size, dtype=complex)
        for i, p in self.embed.items():
            out[p] = self.base.alphas[i]
        return out

    @cached_property
    def padded_dual(self) -> tuple[RatVec, ...]:
        return tuple(self.base.sys.RT.solve(l) for l in self.padded_labels)

    def position_of(self, label) -> int:
        l = as_int_vector(label, self.base.d)
        return self.embed[self.base.index[l]]

    def position_index(self, pos) -> int:
        """Accept a position index or a ``(b, b')`` pair."""
        if isinstance(pos, (int, np.integer)):
            return int(pos)
        b, bp = pos
        return self.positions.index((as_int_vector(b, self.base.d), int(bp)))


def build_dilation(c: FrameCandidate, aux_N: int | None = None) -> DilationSystem:
    """Embed ``L`` into ``B x B'`` with ``0 -> (0, 0)``; nonzero labels fill
    the following lexicographic positions in input order."""
    N, M = c.sys.N, c.M
    if aux_N is None:
        aux_N = max(1, -(-M // N))
    if aux_N < 1 or N * aux_N < M:
        raise CandidateError(f"need N * N' >= M (N={N}, N'={aux_N}, M={M})")
    zero = (0,) * c.d
    # digit 0 first so that (0, 0) is position 0
    digits = [zero] + [b for b in c.sys.B if b != zero]
    positions = tuple((b, bp) for b in digits for bp in range(aux_N))
    embed = {c.index[zero]: 0}
    nxt = 1
    for i, l in enumerate(c.L):
        if l != zero:
            embed[i] = nxt
            nxt += 1
    # R' = N' is expansive once N' >= 2; a single auxiliary digit needs any R'
    return DilationSystem(c, aux_N, max(aux_N, 2), positions, embed)


def complete_orthonormal(cols: np.ndarray, pivot: float = PIVOT_THRESHOLD) -> np.ndarray:
    """Extend orthonormal columns to a unitary by Gram-Schmidt on standard basis seeds."""
    n, m = cols.shape
    basis = [cols[:, j] for j in range(m)]
    for k in range(n):
        if len(basis) == n:
            break
        v = np.zeros(n, dtype=complex)
        v[k] = 1
        for _ in range(2):  # second pass for numerical orthogonality
            for u in basis:
                v = v - np.vdot(u, v) * u
        nv = np.linalg.norm(v)
        if nv < pivot:
            continue
        basis.append(v / nv)
    if len(basis) != n:
        raise ArithmeticError("orthonormal completion failed")
    return np.column_stack(basis)


@dataclass(frozen=True)
class UnitaryCompletion:
    t: np.ndarray  # columns t_c followed by the completion t_d
    e: np.ndarray  # columns e_c followed by the completion e_d
    s: np.ndarray  # rows s_(b,b')
    s00_deviation: float


def padded_frame_matrix(D: DilationSystem) -> np.ndarray:
    base = D.base
    T = np.empty((D.size, base.sys.N), dtype=complex)
    for p in range(D.size):
        for j, b in enumerate(base.sys.B):
            T[p, j] = unit(dot(D.padded_dual[p], b)) * D.padded_alphas[p]
    return T / math.sqrt(base.sys.N)


def complete_to_unitary(D: DilationSystem, tol: float = DEFAULT_TOL) -> UnitaryCompletion:
    base = D.base
    if not check_isometry(base, tol).ok:
        raise IsometryError("columns of the frame matrix are not orthonormal")
    N, Np = base.sys.N, D.aux_N
    t = complete_orthonormal(padded_frame_matrix(D))
    # e_c(c1, c1') = delta(c, c1) / sqrt(N'), indexed in position order
    ec = np.zeros((D.size, N), dtype=complex)
    for p, (b, _) in enumerate(D.positions):
        ec[p, base.sys.B.index(b)] = 1 / math.sqrt(Np)
    e = complete_orthonormal(ec)
    s = t @ e.T
    s00 = float(np.max(np.abs(s[0] - 1 / math.sqrt(N * Np))))
    return UnitaryCompletion(t, e, s, s00)


@dataclass(frozen=True)
class AMatrix:
    """Filter coefficients ``a[(b,b'), (c,c')]`` plus their verification data."""

    values: np.ndarray
    unitarity_deviation: float
    first_row_deviation: float
    row_means: np.ndarray
    row_mean_deviation: float

    def to_json(self) -> dict:
        n = self.values.shape[0]
        return {"rows": n, "cols": n,
                "data": [[float(z.real), float(z.imag)] for z in self.values.ravel()]}


def _phase_matrix(D: DilationSystem, sign: int) -> np.ndarray:
    """``exp(sign 2 pi i (R^T)^{-1} l(b,b') . c)`` over positions x positions."""
    P = np.empty((D.size, D.size), dtype=complex)
    for p in range(D.size):
        for q, (c, _) in enumerate(D.positions):
            P[p, q] = unit(sign * dot(D.padded_dual[p], c))
    return P


def build_a_matrix(D: DilationSystem, completion: UnitaryCompletion | None = None) -> AMatrix:
    """``a = sqrt(N N') exp(-2 pi i (R^T)^{-1} l . c) s`` with its checks.

    The first row is provably all ones; the computed row is verified to be
    within 1e-10 of that and then stored exactly.
    """
    comp = completion or complete_to_unitary(D)
    n = D.size
    NNp = D.base.sys.N * D.aux_N
    a = math.sqrt(NNp) * _phase_matrix(D, -1) * comp.s
    first_dev = float(np.max(np.abs(a[0] - 1)))
    if first_dev > 1e-10:
        raise ArithmeticError(f"first row of a deviates by {first_dev:.3g}")
    a[0] = 1
    U = a * _phase_matrix(D, 1) / math.sqrt(NNp)
    unit_dev = float(np.max(np.abs(U.conj().T @ U - np.eye(n))))
    # (1/N') sum_{c'} a[(b,b'), (c,c')] for each c
    N = D.base.sys.N
    means = a.reshape(n, N, D.aux_N).mean(axis=2)
    mean_dev = float(np.max(np.abs(means - D.padded_alphas[:, None])))
    return AMatrix(a, unit_dev, first_dev, means, mean_dev)


# ---------------------------------------------------------------- filters


def _word_point(sys, word: Sequence) -> RatVec:
    """``sum_k R^{-k} w_k`` for a finite digit word (exact)."""
    acc = (Fraction(0),) * sys.d
    for w in reversed(list(word)):
        acc = sys.R.solve(tuple(x + y for x, y in zip(acc, w)))
    return acc


def _check_word(D: DilationSystem, x_word, xp_word):
    sys = D.base.sys
    xw = [as_int_vector(w, sys.d) for w in x_word]
    for w in xw:
        if w not in sys.B:
            raise CandidateError(f"digit {w} is not in B")
    for w in xp_word:
        if int(w) not in D.aux_B:
            raise CandidateError(f"digit {w} is not in B'")
    return xw


def cuntz_filter_matrix(D: DilationSystem, x_word: Sequence, xp_word: Sequence = (),
                        a: AMatrix | None = None) -> np.ndarray:
    """``(1/sqrt(N N')) m_(b,b')(Upsilon_(c,c')(x, x'))`` at the point coded by
    the digit words; unitary for every point iff the filters generate a
    Cuntz family."""
    xw = _check_word(D, x_word, xp_word)
    a = a or build_a_matrix(D)
    sys = D.base.sys
    x = _word_point(sys, xw)
    F = np.empty((D.size, D.size), dtype=complex)
    for q, (c, _) in enumerate(D.positions):
        y = sys.R.solve(tuple(xi + ci for xi, ci in zip(x, c)))  # R^{-1}(x + c)
        for p in range(D.size):
            F[p, q] = unit(dot(D.padded_labels[p], y)) * a.values[p, q]
    return F / math.sqrt(sys.N * D.aux_N)


def unitarity_deviation(U: np.ndarray) -> float:
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))


@dataclass(frozen=True)
class WordProjection:
    frequency: IntVec
    coefficient: complex
    quadrature_deviation: float


def _shift_phases(D: DilationSystem, x_words: list, k: int) -> np.ndarray:
    """``exp(2 pi i l_p . shift^(j) x)`` for words, j < k and all positions."""
    sys = D.base.sys
    out = np.empty((len(x_words), k, D.size), dtype=complex)
    for w, word in enumerate(x_words):
        for j in range(k):
            y = _word_point(sys, word[j:])
            for p in range(D.size):
                out[w, j, p] = unit(dot(D.padded_labels[p], y))
    return out


def project_cuntz_word(D: DilationSystem, word: Sequence, level: int = 5,
                       a: AMatrix | None = None) -> WordProjection:
    """Closed-form projection of ``S_word 1`` onto functions of ``x`` alone.

    The frequency is ``sum_j (R^T)^j l(w_j)`` and the coefficient the product
    of padded weights.  The closed form is compared, at every level-``level``
    atom ``x``, with the integral of ``S_word 1(x, .)`` against the
    auxiliary level measure, computed from the filter coefficients.
    """
    sys = D.base.sys
    a = a or build_a_matrix(D)
    pos = [D.position_index(p) for p in word]
    freq = (0,) * sys.d
    for p in reversed(pos):
        freq = tuple(x + y for x, y in zip(sys.RT.matvec(freq), D.padded_labels[p]))
    coef = complex(np.prod([D.padded_alphas[p] for p in pos])) if pos else 1 + 0j
    K = max(level, len(pos))
    x_words = [list(w) for w in itertools.product(range(sys.N), repeat=K)]
    xp_words = np.array(list(itertools.product(range(D.aux_N), repeat=K)), dtype=int)
    digit_words = [[sys.B[i] for i in w] for w in x_words]
    ph = _shift_phases(D, digit_words, len(pos))
    b_index = {b: i for i, b in enumerate(sys.B)}
    col_of = {(b_index[b], bp): q for q, (b, bp) in enumerate(D.positions)}
    dev = 0.0
    for w, word_idx in enumerate(x_words):
        vals = np.ones(len(xp_words), dtype=complex)
        for j, p in enumerate(pos):
            cols = np.array([col_of[(word_idx[j], bp)] for bp in range(D.aux_N)])
            vals *= ph[w, j, p] * a.values[p, cols[xp_words[:, j]]]
        integral = vals.mean()
        x = _word_point(sys, digit_words[w])
        closed = coef * unit(dot(freq, x))
        dev = max(dev, abs(integral - closed))
    return WordProjection(freq, coef, dev)


def adjoint_on_exponential(D: DilationSystem, pos, t, x_word: Sequence,
                           a: AMatrix | None = None) -> tuple[complex, complex]:
    """``(S*_(b,b') e_t)(x, x')`` from the averaging formula, and its closed form
    ``conj(alpha) m_B(g(t)) e_{g(t)}(x)``; returns ``(sum_formula, closed_form)``."""
    sys = D.base.sys
    a = a or build_a_matrix(D)
    p = D.position_index(pos)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    x = np.array([float(v) for v in _word_point(sys, [as_int_vector(w, sys.d)
                                                     for w in x_word])])
    Rinv = np.array([[float(v) for v in r] for r in sys.R.inverse])
    lp = np.array(D.padded_labels[p], dtype=float)
    total = 0j
    for q, (c, _) in enumerate(D.positions):
        y = Rinv @ (x + np.array(c, dtype=float))
        m = np.exp(2j * np.pi * (lp @ y)) * a.values[p, q]
        total += np.conj(m) * np.exp(2j * np.pi * (t @ y))
    total /= sys.N * D.aux_N
    g = sys.inv_RT_float @ (t - lp)
    closed = (np.conj(D.padded_alphas[p]) * mask_array(sys, g[None, :])[0]
              * np.exp(2j * np.pi * (g @ x)))
    return complex(total), complex(closed)


def partition_of_unity(D: DilationSystem, t) -> float:
    """``sum_(b,b') |alpha|^2 |m_B(g_(b,b')(t))|^2`` (equals 1)."""
    sys = D.base.sys
    t = np.atleast_1d(np.asarray(t, dtype=float))
    L = np.array(D.padded_labels, dtype=float)
    G = (t[None, :] - L) @ sys.inv_RT_float.T
    return float(np.sum(np.abs(D.padded_alphas) ** 2 * np.abs(mask_array(sys, G)) ** 2))


@dataclass(frozen=True)
class ProjectionCheck:
    orthonormality_deviation: float
    frame_deviation: float


def projected_frame_check(D: DilationSystem, k: int, a: AMatrix | None = None
                          ) -> ProjectionCheck:
    """On the level-``k`` product measure, the functions ``S_w 1`` (``|w| = k``)
    are orthonormal and their projections onto functions of ``x`` form a
    Parseval frame.  Both properties are computed from the filters alone."""
    sys = D.base.sys
    a = a or build_a_matrix(D)
    n, N, Np = D.size, sys.N, D.aux_N
    x_idx = list(itertools.product(range(N), repeat=k))
    xp_idx = np.array(list(itertools.product(range(Np), repeat=k)), dtype=int)
    ph = _shift_phases(D, [[sys.B[i] for i in w] for w in x_idx], k)
    b_index = {b: i for i, b in enumerate(sys.B)}
    col = np.empty((N, Np), dtype=int)
    for q, (b, bp) in enumerate(D.positions):
        col[b_index[b], bp] = q
    words = list(itertools.product(range(n), repeat=k))
    W = np.empty((len(words), len(x_idx), len(xp_idx)), dtype=complex)
    xa = np.array(x_idx, dtype=int)
    for r, word in enumerate(words):
        vals = np.ones((len(x_idx), len(xp_idx)), dtype=complex)
        for j, p in enumerate(word):
            cols = col[xa[:, j][:, None], xp_idx[:, j][None, :]]
            vals *= ph[:, j, p][:, None] * a.values[p][cols]
        W[r] = vals
    flat = W.reshape(len(words), -1)
    gram = flat @ flat.conj().T / flat.shape[1]
    ortho = float(np.max(np.abs(gram - np.eye(len(words)))))
    P = W.mean(axis=2) / math.sqrt(len(x_idx))  # orthonormal coordinates on level-k atoms
    S = P.T @ P.conj()
    frame = float(np.max(np.abs(S - np.eye(len(x_idx)))))
    return ProjectionCheck(ortho, frame)
