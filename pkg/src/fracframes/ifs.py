"""Affine iterated function systems, their mask, Fourier transform and
finite-level atomic approximations of the invariant measure."""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import (AtomBudgetExceeded, CongruentDigitsError, DimensionError,
                     DuplicateDigitError, MissingZeroDigitError,
                     NotExpansiveError)
from .exact import (IntMatrix, IntVec, RatVec, as_int_vector,
                    as_rational_vector, dot, frac_mod1, incongruent_mod,
                    is_expansive, phases_vanish)

DEFAULT_ATOM_BUDGET = 10**6
MIN_TRUNCATION_DEPTH = 8


def atom_budget() -> int:
    """Atom budget, overridable through ``FRACFRAMES_ATOM_BUDGET``."""
    raw = os.environ.get("FRACFRAMES_ATOM_BUDGET")
    return int(raw) if raw else DEFAULT_ATOM_BUDGET


@dataclass(frozen=True)
class IfsSystem:
    """Expansive integer matrix ``R`` and digit set ``B`` (with 0 in ``B``).

    Use :func:`new_ifs` to build a validated instance.
    """

    R: IntMatrix
    B: tuple[IntVec, ...]

    @property
    def d(self) -> int:
        return self.R.dim

    @property
    def N(self) -> int:
        return len(self.B)

    @cached_property
    def RT(self) -> IntMatrix:
        return self.R.T

    @cached_property
    def digits_array(self) -> np.ndarray:
        return np.array(self.B, dtype=float).reshape(self.N, self.d)

    @cached_property
    def inv_RT_float(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.RT.inverse])

    @cached_property
    def min_eig_modulus(self) -> float:
        return float(np.min(np.abs(np.linalg.eigvals(self.R.to_numpy()))))

    @cached_property
    def scalar(self) -> int | None:
        """``R`` as a plain int when d == 1."""
        return self.R.rows[0][0] if self.d == 1 else None

    def to_dict(self) -> dict:
        return {"R": self.R.tolist(), "B": [list(b) for b in self.B]}

    @classmethod
    def from_dict(cls, data: dict) -> "IfsSystem":
        return new_ifs(data["R"], data["B"])


def new_ifs(R, B: Sequence) -> IfsSystem:
    """Validate ``(R, B)`` and return the system.

    Raises a distinct :class:`~fracframes.errors.IfsError` subclass for each
    failure: non-expansive ``R``, 0 missing from ``B``, repeated digits, and
    digits congruent modulo ``R Z^d`` (no certificate of no-overlap).
    """
    R = IntMatrix.of(R)
    d = R.dim
    digits = tuple(as_int_vector(b, d) for b in B)
    if not is_expansive(R):
        raise NotExpansiveError(f"matrix {R.rows} is not expansive")
    if (0,) * d not in digits:
        raise MissingZeroDigitError("digit set must contain 0")
    if len(set(digits)) != len(digits):
        raise DuplicateDigitError(f"repeated digits in {digits}")
    if not incongruent_mod(R, digits):
        raise CongruentDigitsError(f"digits {digits} are not incongruent mod R")
    return IfsSystem(R, digits)


# -------------------------------------------------------------------- mask


def _is_exact(t) -> bool:
    return all(isinstance(x, (int, Fraction, np.integer)) for x in t)


def mask(sys: IfsSystem, t) -> complex:
    """``(1/N) sum_b exp(2 pi i b.t)``.

    Rational ``t`` uses exact phase reduction, and an exactly vanishing sum
    is returned as 0.
    """
    t = (t,) if np.isscalar(t) or isinstance(t, Fraction) else tuple(t)
    if len(t) != sys.d:
        raise DimensionError(f"point {t} has wrong dimension")
    if _is_exact(t):
        exact = [Fraction(dot(b, t)) for b in sys.B]
        if phases_vanish(exact):
            return 0j
        phases = [float(frac_mod1(x)) for x in exact]
    else:
        phases = [math.fmod(float(dot(b, t)), 1.0) for b in sys.B]
    return complex(np.mean(np.exp(2j * np.pi * np.array(phases))))


def mask_array(sys: IfsSystem, X: np.ndarray) -> np.ndarray:
    """Vectorised mask over the rows of ``X`` (shape ``(n, d)``)."""
    X = np.asarray(X, dtype=float).reshape(-1, sys.d)
    ph = np.mod(X @ sys.digits_array.T, 1.0)
    return np.exp(2j * np.pi * ph).mean(axis=1)


def mask_vanishes_exact(sys: IfsSystem, t) -> bool:
    t = as_rational_vector(t, sys.d)
    return phases_vanish(dot(b, t) for b in sys.B)


# ------------------------------------------------------ Fourier transform


def truncation_depth(sys: IfsSystem, t_norm: float, tol: float) -> int:
    """Number of mask factors so the neglected tail changes the product by < tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    rho = sys.min_eig_modulus
    C = 2 * math.pi * sum(math.hypot(*b) for b in sys.B) / sys.N
    if C * t_norm == 0:
        return MIN_TRUNCATION_DEPTH
    # tail sum of C |t| rho^-n over n > K, times a factor 2 for exp(x) - 1 <= 2x
    target = 2 * C * t_norm / (tol * (1 - 1 / rho))
    return max(math.ceil(math.log(target) / math.log(rho)), MIN_TRUNCATION_DEPTH)


def fourier_transform(sys: IfsSystem, t, tol: float = 1e-12) -> complex:
    """Fourier transform of the invariant measure at ``t`` (error < tol)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    t = np.atleast_1d(np.asarray([float(x) for x in np.atleast_1d(t)]))
    return complex(fourier_transform_array(sys, t.reshape(1, sys.d), tol)[0])


def fourier_transform_array(sys: IfsSystem, T: np.ndarray, tol: float = 1e-12,
                            shifts: Sequence | None = None) -> np.ndarray:
    """Vectorised Fourier transform at points ``T - shifts``.

    ``shifts`` are integer frequency vectors.  Their contribution to each
    factor is reduced modulo 1 exactly in integer arithmetic (d == 1), which
    keeps the phases accurate for large frequencies.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    T = np.asarray(T, dtype=float).reshape(-1, sys.d)
    n_pts = T.shape[0]
    lam = None
    if shifts is not None:
        lam = [as_int_vector(s, sys.d) for s in shifts]
        if len(lam) != n_pts:
            if n_pts == 1:
                T = np.repeat(T, len(lam), axis=0)
                n_pts = len(lam)
            else:
                raise DimensionError("shifts must match the number of points")
    norm = float(np.max(np.linalg.norm(T, axis=1))) if n_pts else 0.0
    if lam:
        norm += max(math.hypot(*v) for v in lam)
    K = truncation_depth(sys, norm, tol)
    out = np.ones(n_pts, dtype=complex)
    Minv = sys.inv_RT_float
    y = T.copy()
    if lam is not None and sys.d == 1:
        R = sys.scalar
        lam_int = [v[0] for v in lam]
        for n in range(1, K + 1):
            y = y @ Minv.T
            Rn = R**n
            mod = abs(Rn)
            sgn = 1 if Rn > 0 else -1
            shift = np.array([((sgn * l) % mod) / mod for l in lam_int])
            out *= mask_array(sys, y - shift[:, None])
        return out
    if lam is not None:
        # d > 1: exact rational reduction of (R^T)^{-n} lambda mod 1
        cur = [tuple(Fraction(x) for x in v) for v in lam]
        for n in range(1, K + 1):
            y = y @ Minv.T
            cur = [sys.RT.solve(v) for v in cur]
            shift = np.array([[float(frac_mod1(c)) for c in v] for v in cur])
            out *= mask_array(sys, y - shift)
        return out
    for n in range(1, K + 1):
        y = y @ Minv.T
        out *= mask_array(sys, y)
    return out


def fourier_vanishes_exact(sys: IfsSystem, t, depth: int) -> bool:
    """Exact certificate that the Fourier transform vanishes at rational ``t``.

    True iff one of the first ``depth`` mask factors is exactly zero.  False
    is inconclusive.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    y = as_rational_vector(t, sys.d)
    if not any(y):
        return False
    for _ in range(depth):
        y = sys.RT.solve(y)
        if mask_vanishes_exact(sys, y):
            return True
    return False


# --------------------------------------------------------- atomic measures


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite probability measure with rational atoms and masses."""

    atoms: tuple[tuple[RatVec, Fraction], ...]

    def __post_init__(self):
        pts = [p for p, _ in self.atoms]
        if len(set(pts)) != len(pts):
            raise ValueError("atoms must be pairwise distinct")
        if sum(m for _, m in self.atoms) != 1:
            raise ValueError("masses must sum to 1")

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def points(self) -> list[RatVec]:
        return [p for p, _ in self.atoms]

    @property
    def masses(self) -> list[Fraction]:
        return [m for _, m in self.atoms]

    def as_dict(self) -> dict[RatVec, Fraction]:
        return dict(self.atoms)

    def fourier(self, t) -> complex:
        """``integral exp(2 pi i t.x) d(self)(x)``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        X = np.array([[float(c) for c in p] for p in self.points])
        w = np.array([float(m) for m in self.masses])
        return complex(np.sum(w * np.exp(2j * np.pi * (X @ t))))

    def to_csv(self) -> str:
        d = len(self.atoms[0][0]) if self.atoms else 1
        head = ",".join([f"x{i}" for i in range(d)] + ["mass"])
        lines = [head]
        for p, m in self.atoms:
            lines.append(",".join([str(c) for c in p] + [str(m)]))
        return "\n".join(lines) + "\n"


def digit_words(sys: IfsSystem, k: int):
    return itertools.product(sys.B, repeat=k)


def level_measure(sys: IfsSystem, k: int, budget: int | None = None) -> AtomicMeasure:
    """Equal-mass atoms ``R^{-k}(b_0 + R b_1 + ... + R^{k-1} b_{k-1})``."""
    if k < 1:
        raise ValueError("level must be >= 1")
    budget = atom_budget() if budget is None else budget
    if sys.N**k > budget:
        raise AtomBudgetExceeded(f"{sys.N}**{k} atoms exceed the budget {budget}")
    Rk = sys.R.power(k)
    mass = Fraction(1, sys.N**k)
    atoms = []
    for word in digit_words(sys, k):
        acc = (0,) * sys.d
        for b in reversed(word):  # Horner: b_0 + R(b_1 + R(...))
            acc = tuple(x + y for x, y in zip(sys.R.matvec(acc), b))
        atoms.append((Rk.solve(acc), mass))
    return AtomicMeasure(tuple(atoms))


def attractor_box(sys: IfsSystem):
    """Bounding box of the attractor.

    Exact ``(lo, hi)`` Fractions when d == 1 (negative ``R`` handled by
    splitting even and odd powers); numeric per-component bounds otherwise.
    """
    if sys.d == 1:
        R = sys.scalar
        lo_b = min(b[0] for b in sys.B)
        hi_b = max(b[0] for b in sys.B)
        if R > 0:
            return Fraction(lo_b, R - 1), Fraction(hi_b, R - 1)
        even = Fraction(1, R * R - 1)
        odd = Fraction(R, R * R - 1)  # negative
        return lo_b * even + hi_b * odd, hi_b * even + lo_b * odd
    inv = np.array([[float(x) for x in r] for r in sys.R.inverse])
    Bm = sys.digits_array.T
    lo = np.zeros(sys.d)
    hi = np.zeros(sys.d)
    P = np.eye(sys.d)
    rho = sys.min_eig_modulus
    bmax = max(np.linalg.norm(b) for b in sys.digits_array)
    for _ in range(200):
        P = inv @ P
        img = P @ Bm
        lo += img.min(axis=1)
        hi += img.max(axis=1)
        if np.linalg.norm(P, 2) * bmax / (1 - 1 / rho) < 1e-13:
            break
    slack = np.linalg.norm(P, 2) * bmax / max(rho - 1, 1e-12)
    return lo - slack, hi + slack
