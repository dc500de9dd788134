"""Frame data ``(L, alpha)`` over an affine IFS and the finite admissibility
checks that can be run on it."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import CandidateError, DimensionError, GridNotClosedError
from .exact import (IntVec, RatVec, as_int_vector, as_rational_vector, dot,
                    frac_mod1, is_integral, phases_vanish, residues_mod, unit)
from .ifs import IfsSystem, mask, mask_array, mask_vanishes_exact, new_ifs

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class ExactWeight:
    """Weight ``sqrt(abs2) * exp(2 pi i phase)`` with rational ``abs2`` and ``phase``."""

    abs2: Fraction
    phase: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "abs2", Fraction(self.abs2))
        object.__setattr__(self, "phase", frac_mod1(Fraction(self.phase)))
        if self.abs2 < 0:
            raise CandidateError("squared modulus must be nonnegative")

    @classmethod
    def sqrt_recip(cls, n: int) -> "ExactWeight":
        return cls(Fraction(1, n))

    def __complex__(self) -> complex:
        return math.sqrt(self.abs2) * unit(self.phase)


def weight_value(w) -> tuple[complex, Fraction | None]:
    """Numeric value and, when it is known exactly, the squared modulus."""
    if isinstance(w, ExactWeight):
        return complex(w), w.abs2
    if isinstance(w, Mapping):
        if "sqrt_recip" in w:
            return weight_value(ExactWeight.sqrt_recip(int(w["sqrt_recip"])))
        if "abs2" in w:
            return weight_value(ExactWeight(Fraction(str(w["abs2"])),
                                            Fraction(str(w.get("phase", 0)))))
        w = complex(float(w.get("re", 0.0)), float(w.get("im", 0.0)))
    z = complex(w)
    exact = None
    if z.real.is_integer() and z.imag.is_integer():
        exact = Fraction(int(z.real) ** 2 + int(z.imag) ** 2)
    return z, exact


@dataclass(frozen=True)
class FrameCandidate:
    """IFS plus labels ``L`` (containing 0) and weights; weight of label 0 is 1."""

    sys: IfsSystem
    L: tuple[IntVec, ...]
    alphas: tuple[complex, ...]
    alpha_sq_exact: tuple[Fraction | None, ...] = field(repr=False)
    allow_zero: bool = False

    @property
    def M(self) -> int:
        return len(self.L)

    @property
    def d(self) -> int:
        return self.sys.d

    @cached_property
    def index(self) -> dict[IntVec, int]:
        return {l: i for i, l in enumerate(self.L)}

    def alpha(self, l) -> complex:
        return self.alphas[self.index[as_int_vector(l, self.d)]]

    @cached_property
    def alpha_sq(self) -> tuple:
        """``|alpha_l|^2``: Fractions where exact, floats otherwise."""
        return tuple(e if e is not None else abs(a) ** 2
                     for a, e in zip(self.alphas, self.alpha_sq_exact))

    @property
    def exact_weights(self) -> bool:
        return all(e is not None for e in self.alpha_sq_exact)

    @cached_property
    def dual_labels(self) -> tuple[RatVec, ...]:
        """``(R^T)^{-1} l`` for each label, exactly."""
        return tuple(self.sys.RT.solve(l) for l in self.L)

    @cached_property
    def active(self) -> tuple[int, ...]:
        """Indices of labels with nonzero weight."""
        return tuple(i for i, a in enumerate(self.alphas) if a != 0)

    @property
    def labels_1d(self) -> list[int]:
        return [l[0] for l in self.L]

    def with_labels(self, L: Sequence, alphas: Sequence) -> "FrameCandidate":
        return new_candidate(self.sys, L, alphas, allow_zero=self.allow_zero)


def new_candidate(sys: IfsSystem | tuple, L: Sequence, alphas: Sequence,
                  allow_zero: bool = False) -> FrameCandidate:
    """Validate and build a :class:`FrameCandidate`.

    ``sys`` may be an ``IfsSystem`` or an ``(R, B)`` pair.  Weights may be
    complex numbers, :class:`ExactWeight` instances or their JSON forms.
    Zero weights are rejected unless ``allow_zero`` (padded labels).
    """
    if not isinstance(sys, IfsSystem):
        sys = new_ifs(*sys)
    labels = tuple(as_int_vector(l, sys.d) for l in L)
    if len(labels) != len(alphas):
        raise CandidateError("need one weight per label")
    if len(set(labels)) != len(labels):
        raise CandidateError(f"repeated labels in {labels}")
    zero = (0,) * sys.d
    if zero not in labels:
        raise CandidateError("label set must contain 0")
    vals = [weight_value(a) for a in alphas]
    z, e = vals[labels.index(zero)]
    if abs(z - 1) > 1e-12 or (e is not None and e != 1):
        raise CandidateError("weight of label 0 must be 1")
    if not allow_zero and any(v == 0 for v, _ in vals):
        raise CandidateError("zero weights need allow_zero=True")
    return FrameCandidate(sys, labels, tuple(v for v, _ in vals),
                          tuple(e for _, e in vals), allow_zero)


# --------------------------------------------------------- matrix identities


def frame_matrix(c: FrameCandidate) -> np.ndarray:
    """The ``M x N`` matrix ``exp(2 pi i (R^T)^{-1} l . b) alpha_l / sqrt(N)``."""
    T = np.empty((c.M, c.sys.N), dtype=complex)
    for i, (dl, a) in enumerate(zip(c.dual_labels, c.alphas)):
        for j, b in enumerate(c.sys.B):
            T[i, j] = unit(dot(dl, b)) * a
    return T / math.sqrt(c.sys.N)


@dataclass(frozen=True)
class IsometryReport:
    ok: bool
    max_deviation: float


def check_isometry(c: FrameCandidate, tol: float = DEFAULT_TOL) -> IsometryReport:
    """Columns of :func:`frame_matrix` orthonormal, in max norm within ``tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    T = frame_matrix(c)
    dev = float(np.max(np.abs(T.conj().T @ T - np.eye(c.sys.N))))
    return IsometryReport(dev <= tol, dev)


def atomic_frame_operator(points: Sequence[RatVec], masses: Sequence[Fraction],
                          frequencies: Sequence[IntVec],
                          weights: Sequence[complex]) -> np.ndarray:
    """Frame operator of ``{w_j e_{lambda_j}}`` on ``L^2`` of an atomic measure.

    Expressed in the orthonormal basis of normalised point masses, so a
    Parseval frame gives the identity.  Phases ``lambda.x`` are reduced mod 1
    in exact integer arithmetic.
    """
    den = math.lcm(*[x.denominator for p in points for x in p], 1)
    num = np.array([[int(x * den) for x in p] for p in points], dtype=object)
    lam = np.array([list(l) for l in frequencies], dtype=object)
    ph = (num @ lam.T) % den if len(frequencies) else np.zeros((len(points), 0))
    phase = np.asarray(ph, dtype=float) / den
    V = np.exp(2j * np.pi * phase)
    V *= np.sqrt(np.array([float(m) for m in masses]))[:, None]
    V *= np.asarray(weights, dtype=complex)[None, :]
    return V @ V.conj().T


def parseval_on_delta_deviation(c: FrameCandidate) -> float:
    from .ifs import level_measure

    mu1 = level_measure(c.sys, 1)
    S = atomic_frame_operator(mu1.points, mu1.masses, c.L, c.alphas)
    return float(np.max(np.abs(S - np.eye(len(mu1)))))


def check_parseval_on_delta(c: FrameCandidate, tol: float = DEFAULT_TOL) -> bool:
    """``{alpha_l e_l}`` is a Parseval frame for ``L^2`` of the equal-mass
    measure on ``R^{-1} B``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return parseval_on_delta_deviation(c) <= tol


# ------------------------------------------------------- transfer operator


def branch(c: FrameCandidate, i: int, t: RatVec) -> RatVec:
    """``g_l(t) = (R^T)^{-1}(t - l)`` for label index ``i``, exactly."""
    l = c.L[i]
    return c.sys.RT.solve(tuple(a - b for a, b in zip(t, l)))


def transfer_apply(c: FrameCandidate, f: Mapping) -> dict:
    """Apply the transfer operator to a function sampled on a rational grid.

    ``(Rf)(t) = sum_l |alpha_l|^2 |m_B(g_l t)|^2 f(g_l t)``.  The grid must
    contain every ``g_l(t)`` whose weight is nonzero (decided exactly);
    otherwise :class:`GridNotClosedError` lists the missing points.  Keys may
    be rationals (d == 1) or rational tuples; the output uses the input keys.
    """
    keyed = {as_rational_vector(k, c.d): k for k in f}
    values = {v: f[k] for v, k in keyed.items()}
    out = {}
    missing = []
    for v, key in keyed.items():
        acc = 0.0
        for i in c.active:
            y = branch(c, i, v)
            if mask_vanishes_exact(c.sys, y):
                continue
            if y not in values:
                missing.append(y[0] if c.d == 1 else y)
                continue
            acc += c.alpha_sq[i] * abs(mask(c.sys, y)) ** 2 * values[y]
        out[key] = acc
    if missing:
        raise GridNotClosedError(sorted(set(missing)))
    return out


def transfer_operator(c: FrameCandidate, f: Callable[[np.ndarray], np.ndarray]
                      ) -> Callable[[np.ndarray], np.ndarray]:
    """Transfer operator acting on a vectorised function of real points.

    ``f`` and the returned callable take arrays of shape ``(n, d)`` (or
    ``(n,)`` when d == 1).
    """
    Minv = c.sys.inv_RT_float
    Lf = np.array(c.L, dtype=float)
    w = np.array([float(x) for x in c.alpha_sq])

    def Rf(t):
        t = np.asarray(t, dtype=float)
        flat = t.ndim == 1 and c.d == 1
        X = t.reshape(-1, c.d)
        acc = np.zeros(X.shape[0])
        for i in range(c.M):
            Y = (X - Lf[i]) @ Minv.T
            fy = np.asarray(f(Y[:, 0] if flat else Y), dtype=float)
            acc += w[i] * np.abs(mask_array(c.sys, Y)) ** 2 * fy
        return acc

    return Rf


# --------------------------------------------------------- necessary checks


@dataclass(frozen=True)
class LabelVerdict:
    label: IntVec
    alpha_zero: bool
    sum_vanishes: bool

    @property
    def passes(self) -> bool:
        return self.label == (0,) * len(self.label) or self.alpha_zero or self.sum_vanishes


@dataclass(frozen=True)
class VanishingSumReport:
    """Per-label verdicts plus the residues mod ``R^T Z^d`` that could ever pass."""

    labels: tuple[LabelVerdict, ...]
    feasible_residues: tuple[IntVec, ...]

    @property
    def ok(self) -> bool:
        return all(v.passes for v in self.labels)

    @property
    def failing(self) -> list[IntVec]:
        return [v.label for v in self.labels if not v.passes]

    @property
    def any_label_possible(self) -> bool:
        """False proves that no nonzero integer label can ever pass."""
        return bool(self.feasible_residues)


def digit_sum_vanishes(sys: IfsSystem, l) -> bool:
    """``sum_b exp(2 pi i (R^T)^{-1} l . b) == 0`` exactly."""
    dl = sys.RT.solve(as_int_vector(l, sys.d))
    return phases_vanish(dot(dl, b) for b in sys.B)


def check_vanishing_sums(c: FrameCandidate) -> VanishingSumReport:
    """Necessary condition for the isometry: each nonzero label with nonzero
    weight has a vanishing digit exponential sum.

    The sum depends only on ``l`` mod ``R^T Z^d``, so scanning one
    representative per class decides feasibility for all integer labels.
    """
    zero = (0,) * c.d
    verdicts = tuple(
        LabelVerdict(l, a == 0, l != zero and digit_sum_vanishes(c.sys, l))
        for l, a in zip(c.L, c.alphas))
    feasible = tuple(r for r in residues_mod(c.sys.RT)
                     if any(r) and digit_sum_vanishes(c.sys, r))
    return VanishingSumReport(verdicts, feasible)


@dataclass(frozen=True)
class CongruenceReport:
    classes: tuple[tuple[IntVec, ...], ...]
    class_sums: tuple
    N_le_card: bool

    @property
    def card(self) -> int:
        return len(self.classes)

    @property
    def class_ok(self) -> tuple[bool, ...]:
        return tuple(s <= 1 + 1e-12 for s in self.class_sums)


def labels_equivalent(sys: IfsSystem, l1, l2) -> bool:
    """``(l2 - l1) . R^{-1} b`` is an integer for every digit."""
    diff = tuple(a - b for a, b in zip(l2, l1))
    dl = sys.RT.solve(diff)
    return is_integral(dot(dl, b) for b in sys.B)


def congruence_report(c: FrameCandidate) -> CongruenceReport:
    """Partition of the nonzero-weight labels into equivalence classes,
    the bound ``N <= #classes`` and the per-class sums of ``|alpha|^2``."""
    classes: list[list[int]] = []
    for i in c.active:
        for cls in classes:
            if labels_equivalent(c.sys, c.L[cls[0]], c.L[i]):
                cls.append(i)
                break
        else:
            classes.append([i])
    sums = tuple(sum((c.alpha_sq[i] for i in cls), start=Fraction(0))
                 for cls in classes)
    return CongruenceReport(tuple(tuple(c.L[i] for i in cls) for cls in classes),
                            sums, c.sys.N <= len(classes))


# ------------------------------------------------------- structured families


@dataclass(frozen=True)
class FamilyVerdict:
    conditions: dict
    details: dict

    @property
    def isometry_conditions(self) -> bool:
        """Conditions (i)-(iv): equivalent to the isometry."""
        return all(self.conditions[k] for k in ("i", "ii", "iii", "iv"))

    @property
    def parseval_sufficient(self) -> bool:
        return self.isometry_conditions and self.conditions["v"]


def p_adic(n: int, p: int) -> tuple[int, int]:
    """``(v, m)`` with ``n = p**v * m`` and ``p`` not dividing ``m``."""
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


def _sum_is_one(c: FrameCandidate, idx: Iterable[int], tol: float) -> bool:
    vals = [c.alpha_sq[i] for i in idx]
    total = sum(vals, start=Fraction(0))
    if all(isinstance(v, Fraction) for v in vals):
        return total == 1
    return abs(float(total) - 1) <= tol


def _require_1d(c: FrameCandidate, n_digits: int):
    if c.d != 1:
        raise DimensionError("family checkers are one-dimensional")
    if c.sys.N != n_digits:
        raise CandidateError(f"family checker needs exactly {n_digits} digits")


def check_two_digit_family(c: FrameCandidate, tol: float = DEFAULT_TOL) -> FamilyVerdict:
    """Arithmetic characterisation of the isometry for ``B = {0, b}``.

    (i) ``R = 2^a r``, a >= 1, r odd; (ii) ``b = 2^beta q``, beta <= a - 1,
    q odd; (iii) every nonzero label is ``2^(a-1-beta) s`` with s odd and r
    dividing q s; (iv) nonzero weights have squared moduli summing to 1;
    (v) two nonzero labels are incongruent mod R.
    """
    _require_1d(c, 2)
    R = c.sys.scalar
    b = next(x[0] for x in c.sys.B if x[0] != 0)
    nz = [i for i in c.active if c.L[i][0] != 0]
    a, r = p_adic(abs(R), 2)
    r = r if R > 0 else -r
    beta, q = p_adic(b, 2)
    cond = {"i": a >= 1}
    cond["ii"] = cond["i"] and beta <= a - 1
    ok3 = cond["ii"]
    if ok3:
        for i in nz:
            g, s = p_adic(c.L[i][0], 2)
            if g != a - 1 - beta or (q * s) % r != 0:
                ok3 = False
                break
    cond["iii"] = ok3
    cond["iv"] = _sum_is_one(c, nz, tol)
    labels = [c.L[i][0] for i in nz]
    cond["v"] = any((x - y) % R != 0 for x in labels for y in labels)
    return FamilyVerdict(cond, {"alpha": a, "r": r, "beta": beta, "q": q})


def check_three_digit_family(c: FrameCandidate, tol: float = DEFAULT_TOL) -> FamilyVerdict:
    """Arithmetic characterisation of the isometry for ``B = {0, b1, b2}``.

    (i) ``R = 3^a r``, a >= 1, 3 not dividing r; (ii) ``b_i = 3^beta q_i``
    with a common beta <= a - 1, 3 not dividing q_i, q1 != q2 mod 3;
    (iii) every nonzero label is ``3^(a-1-beta) s`` with 3 not dividing s and
    r dividing q_i s; (iv) for each nonzero residue of s mod 3 the weights of
    that class have squared moduli summing to 1; (v) each of the two classes
    holds two labels incongruent mod R.
    """
    _require_1d(c, 3)
    R = c.sys.scalar
    b1, b2 = [x[0] for x in c.sys.B if x[0] != 0]
    nz = [i for i in c.active if c.L[i][0] != 0]
    a, r = p_adic(abs(R), 3)
    r = r if R > 0 else -r
    (be1, q1), (be2, q2) = p_adic(b1, 3), p_adic(b2, 3)
    cond = {"i": a >= 1}
    cond["ii"] = cond["i"] and be1 == be2 and be1 <= a - 1 and (q1 - q2) % 3 != 0
    s_of: dict[int, int] = {}
    ok3 = cond["ii"]
    if ok3:
        for i in nz:
            g, s = p_adic(c.L[i][0], 3)
            if g != a - 1 - be1 or (q1 * s) % r or (q2 * s) % r:
                ok3 = False
                break
            s_of[i] = s
    cond["iii"] = ok3
    if ok3:
        cls1 = [i for i in nz if s_of[i] % 3 == 1]
        cls2 = [i for i in nz if s_of[i] % 3 == 2]
        cond["iv"] = _sum_is_one(c, cls1, tol) and _sum_is_one(c, cls2, tol)

        def separated(cls):
            ls = [c.L[i][0] for i in cls]
            return any((x - y) % R != 0 for x in ls for y in ls)

        cond["v"] = separated(cls1) and separated(cls2)
    else:
        cond["iv"] = False
        cond["v"] = False
    return FamilyVerdict(cond, {"alpha": a, "r": r, "beta": be1 if be1 == be2 else None,
                                "q": (q1, q2)})


def make_integer_base_family(N: int, subsets: Sequence[Iterable[int]],
                             weights: Mapping | None = None) -> FrameCandidate:
    """Candidate over ``R = N``, ``B = {0..N-1}`` with
    ``L = {0} U (1 + N L_1) U ... U (N-1 + N L_{N-1})``.

    ``weights`` maps full labels ``i + N l`` to weights; labels not listed get
    equal exact weights ``1/sqrt(#L_i)`` within their residue class.
    """
    if N < 3:
        raise CandidateError("integer-base family needs N >= 3")
    subsets = [list(s) for s in subsets]
    if len(subsets) != N - 1:
        raise CandidateError(f"need {N - 1} subsets, got {len(subsets)}")
    weights = dict(weights or {})
    labels, alphas = [0], [1]
    for i, Li in enumerate(subsets, start=1):
        name = f"L_{i}"
        if not Li:
            raise CandidateError(f"{name} must be nonempty")
        if len(set(Li)) != len(Li):
            raise CandidateError(f"{name} has repeated entries")
        if i <= N - 2 and 0 not in Li:
            raise CandidateError(f"{name} must contain 0")
        if i == N - 1 and -1 not in Li:
            raise CandidateError(f"{name} must contain -1")
        cls = [i + N * l for l in Li]
        ws = [weights.get(l, ExactWeight.sqrt_recip(len(cls))) for l in cls]
        vals = [weight_value(w) for w in ws]
        exact = [e for _, e in vals]
        if all(e is not None for e in exact):
            good = sum(exact) == 1
        else:
            good = abs(sum(abs(v) ** 2 for v, _ in vals) - 1) <= DEFAULT_TOL
        if not good:
            raise CandidateError(f"weights on {name} must have squared moduli summing to 1")
        labels += cls
        alphas += ws
    return new_candidate(new_ifs(N, list(range(N))), labels, alphas)
