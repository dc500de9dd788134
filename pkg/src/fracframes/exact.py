"""Exact integer-matrix, rational and root-of-unity primitives.

Rationals are :class:`fractions.Fraction`.  Integer vectors are tuples of
``int``; rational vectors are tuples of ``Fraction``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache, reduce
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionError, SingularMatrixError

IntVec = tuple[int, ...]
RatVec = tuple[Fraction, ...]

# eigenvalue-modulus margin for the numeric expansivity test (d >= 3)
EXPANSIVE_MARGIN = 1e-9


def as_int_vector(v, d: int | None = None) -> IntVec:
    """Coerce an int or a sequence of ints to an integer tuple of length ``d``."""
    if isinstance(v, (int, np.integer)):
        out = (int(v),)
    else:
        out = tuple(int(x) for x in v)
        for x, y in zip(out, v):
            if x != y:
                raise ValueError(f"non-integer entry in {v!r}")
    if d is not None and len(out) != d:
        raise DimensionError(f"expected a vector of dimension {d}, got {v!r}")
    return out


def as_rational_vector(v, d: int | None = None) -> RatVec:
    if isinstance(v, (int, Fraction, np.integer)):
        out = (Fraction(v),)
    elif isinstance(v, str):
        out = (Fraction(v),)
    else:
        out = tuple(Fraction(x) for x in v)
    if d is not None and len(out) != d:
        raise DimensionError(f"expected a vector of dimension {d}, got {v!r}")
    return out


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), start=0)


def frac_mod1(x: Fraction) -> Fraction:
    return x - math.floor(x)


def unit(theta) -> complex:
    """``exp(2*pi*i*theta)``; rational ``theta`` is reduced mod 1 exactly first."""
    if isinstance(theta, (int, Fraction)):
        theta = frac_mod1(Fraction(theta))
        if theta == 0:
            return 1 + 0j
        if theta == Fraction(1, 2):
            return -1 + 0j
        if theta == Fraction(1, 4):
            return 1j
        if theta == Fraction(3, 4):
            return -1j
        theta = float(theta)
    return cmath.exp(2j * math.pi * theta)


def is_integral(v: Iterable[Fraction]) -> bool:
    return all(Fraction(x).denominator == 1 for x in v)


def lcm_all(values: Iterable[int]) -> int:
    return reduce(math.lcm, values, 1)


# ---------------------------------------------------------------- matrices


def _bareiss_det(rows: list[list[int]]) -> int:
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class IntMatrix:
    """Square integer matrix with exact determinant and rational inverse."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = self.rows
        if isinstance(rows, (int, np.integer)):
            rows = ((int(rows),),)
        else:
            rows = tuple(as_int_vector(r) if not isinstance(r, (int, np.integer))
                         else (int(r),) for r in rows)
        if not rows:
            raise DimensionError("empty matrix")
        d = len(rows)
        if any(len(r) != d for r in rows):
            raise DimensionError(f"matrix is not square: {rows!r}")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def of(cls, data) -> "IntMatrix":
        """Build from an int (1x1), a flat 1-element list, or nested rows."""
        if isinstance(data, IntMatrix):
            return data
        if isinstance(data, np.ndarray):
            data = data.tolist()
        if isinstance(data, (int, np.integer)):
            return cls(((int(data),),))
        data = list(data)
        if data and all(isinstance(x, (int, np.integer)) for x in data):
            if len(data) == 1:
                return cls(((int(data[0]),),))
            raise DimensionError(f"flat list {data!r} is not a square matrix")
        return cls(tuple(tuple(r) for r in data))

    @property
    def dim(self) -> int:
        return len(self.rows)

    @cached_property
    def T(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.rows)))

    @cached_property
    def det(self) -> int:
        return _bareiss_det([list(r) for r in self.rows])

    @cached_property
    def inverse(self) -> tuple[tuple[Fraction, ...], ...]:
        n = self.dim
        if self.det == 0:
            raise SingularMatrixError(f"matrix {self.rows} is singular")
        a = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
             for i, r in enumerate(self.rows)]
        for col in range(n):
            piv = next(i for i in range(col, n) if a[i][col] != 0)
            a[col], a[piv] = a[piv], a[col]
            p = a[col][col]
            a[col] = [x / p for x in a[col]]
            for i in range(n):
                if i != col and a[i][col] != 0:
                    f = a[i][col]
                    a[i] = [x - f * y for x, y in zip(a[i], a[col])]
        return tuple(tuple(r[n:]) for r in a)

    def matvec(self, v: Sequence):
        return tuple(dot(r, v) for r in self.rows)

    def solve(self, v: Sequence) -> RatVec:
        """Exact ``M^{-1} v``."""
        return tuple(dot(r, v) for r in self.inverse)

    def matmul(self, other: "IntMatrix") -> "IntMatrix":
        cols = list(zip(*other.rows))
        return IntMatrix(tuple(tuple(dot(r, c) for c in cols) for r in self.rows))

    def power(self, k: int) -> "IntMatrix":
        out = IntMatrix(tuple(tuple(int(i == j) for j in range(self.dim))
                              for i in range(self.dim)))
        for _ in range(k):
            out = out.matmul(self)
        return out

    def to_numpy(self) -> np.ndarray:
        return np.array(self.rows, dtype=float)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]


def _as_matrix(M) -> IntMatrix:
    return M if isinstance(M, IntMatrix) else IntMatrix.of(M)


def is_expansive(M) -> bool:
    """True iff every eigenvalue of the integer matrix ``M`` has modulus > 1.

    Exact for d <= 2.  For d >= 3 eigenvalues +-1 are excluded exactly and the
    rest is decided numerically; moduli within ``EXPANSIVE_MARGIN`` of 1 are
    treated as indeterminate and rejected.
    """
    M = _as_matrix(M)
    d = M.dim
    if d == 1:
        return abs(M.rows[0][0]) > 1
    if d == 2:
        # Jury test on the reversed characteristic polynomial
        det = M.det
        tr = M.rows[0][0] + M.rows[1][1]
        return abs(det) >= 2 and abs(tr) < abs(det + 1)
    eye = np.eye(d, dtype=int)
    for s in (1, -1):
        shifted = IntMatrix(tuple(tuple(int(x) for x in r)
                                  for r in (np.array(M.rows) - s * eye)))
        if shifted.det == 0:
            return False
    eig = np.linalg.eigvals(M.to_numpy())
    return bool(np.min(np.abs(eig)) > 1 + EXPANSIVE_MARGIN)


def incongruent_mod(M, V: Iterable) -> bool:
    """True iff the integer vectors in ``V`` are pairwise incongruent mod ``M Z^d``."""
    M = _as_matrix(M)
    if M.det == 0:
        raise SingularMatrixError("incongruence test needs a nonsingular matrix")
    vs = [as_int_vector(v, M.dim) for v in V]
    for i in range(len(vs)):
        for j in range(i + 1, len(vs)):
            diff = tuple(a - b for a, b in zip(vs[i], vs[j]))
            if is_integral(M.solve(diff)):
                return False
    return True


def residues_mod(M) -> list[IntVec]:
    """One representative of each class of ``Z^d / M Z^d``."""
    M = _as_matrix(M)
    n = abs(M.det)
    if n == 0:
        raise SingularMatrixError("residues of a singular matrix")
    d = M.dim
    reps: list[IntVec] = []
    # n Z^d is contained in M Z^d, so the box [0, n)^d covers every class
    for v in np.ndindex(*([n] * d)):
        v = tuple(int(x) for x in v)
        if all(not is_integral(M.solve(tuple(a - b for a, b in zip(v, r))))
               for r in reps):
            reps.append(v)
            if len(reps) == n:
                break
    return reps


# -------------------------------------------------------- roots of unity


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    """Divide integer polynomials (low -> high coefficients); ``den`` monic."""
    num = list(num)
    dn = len(den) - 1
    assert den[-1] == 1
    if len(num) <= dn:
        return [0], num
    quot = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c:
            quot[i - dn] = c
            for j, dc in enumerate(den):
                num[i - dn + j] -= c * dc
    return quot, num[:dn] if dn else [0]


@lru_cache(maxsize=None)
def cyclotomic(q: int) -> tuple[int, ...]:
    """Coefficients (low -> high) of the q-th cyclotomic polynomial."""
    if q < 1:
        raise ValueError("order must be positive")
    poly = [-1] + [0] * (q - 1) + [1]
    for e in range(1, q):
        if q % e == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic(e)))
            assert not any(rem)
    return tuple(poly)


@dataclass(frozen=True)
class CycloExpression:
    """The sum ``sum_r multiplicity[r] * zeta_q**r`` with ``zeta_q = exp(2 pi i / q)``."""

    order: int
    multiset: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be positive")
        acc: dict[int, int] = {}
        for r, m in dict(self.multiset).items():
            acc[r % self.order] = acc.get(r % self.order, 0) + int(m)
        object.__setattr__(self, "multiset",
                           {r: m for r, m in sorted(acc.items()) if m})

    @classmethod
    def from_phases(cls, phases: Iterable[Fraction]) -> "CycloExpression":
        """Expression for ``sum_j exp(2 pi i phase_j)`` with rational phases."""
        phases = [frac_mod1(Fraction(p)) for p in phases]
        q = lcm_all(p.denominator for p in phases)
        ms: dict[int, int] = {}
        for p in phases:
            r = int(p * q)
            ms[r] = ms.get(r, 0) + 1
        return cls(q, ms)

    def value(self) -> complex:
        return sum(m * cmath.exp(2j * math.pi * r / self.order)
                   for r, m in self.multiset.items())


# squarefree orders up to this size are tested by direct polynomial division
DIRECT_DIVISION_MAX_ORDER = 4096


def _smallest_prime_factor(n: int) -> int:
    p = 2
    while p * p <= n:
        if n % p == 0:
            return p
        p += 1
    return n


def _prime_factors(n: int) -> list[int]:
    out = []
    while n > 1:
        p = _smallest_prime_factor(n)
        out.append(p)
        while n % p == 0:
            n //= p
    return out


def _vanishes(q: int, ms: dict[int, int]) -> bool:
    ms = {r: m for r, m in ms.items() if m}
    if not ms:
        return True
    if q == 1:
        return sum(ms.values()) == 0
    primes = _prime_factors(q)
    for p in primes:
        if q % (p * p) == 0:
            # 1, zeta_q, ..., zeta_q^(p-1) is a basis of Q(zeta_q) over Q(zeta_{q/p})
            parts: dict[int, dict[int, int]] = {}
            for r, m in ms.items():
                part = parts.setdefault(r % p, {})
                k = (r // p) % (q // p)
                part[k] = part.get(k, 0) + m
            return all(_vanishes(q // p, part) for part in parts.values())
    if q <= DIRECT_DIVISION_MAX_ORDER:
        coeffs = [0] * q
        for r, m in ms.items():
            coeffs[r] += m
        _, rem = _poly_divmod(coeffs, list(cyclotomic(q)))
        return not any(rem)
    # squarefree q = p m: over Q(zeta_m) the only relation among the powers of
    # zeta_p is 1 + zeta_p + ... + zeta_p^(p-1) = 0
    p = primes[-1]
    m = q // p
    inv = pow(m, -1, p)
    parts = {a: {} for a in range(p)}
    for r, mult in ms.items():
        # zeta_q^r = zeta_p^(r m^-1 mod p) * zeta_m^(r p^-1 mod m)
        a = (r * inv) % p
        b = (r * pow(p, -1, m)) % m if m > 1 else 0
        parts[a][b] = parts[a].get(b, 0) + mult
    last = parts[p - 1]
    for a in range(p - 1):
        diff = dict(parts[a])
        for b, mult in last.items():
            diff[b] = diff.get(b, 0) - mult
        if not _vanishes(m, diff):
            return False
    return True


def cyclo_is_zero(e: CycloExpression) -> bool:
    """Exact test ``sum m_r zeta_q^r == 0``.

    Prime-power parts of ``q`` are split off first, which leaves sums over a
    squarefree order.  Those are decided by divisibility by the cyclotomic
    polynomial, or by a further split over one prime when the order is large.
    """
    return _vanishes(e.order, dict(e.multiset))


def phases_vanish(phases: Iterable[Fraction]) -> bool:
    """True iff ``sum_j exp(2 pi i phase_j) == 0`` exactly."""
    return cyclo_is_zero(CycloExpression.from_phases(phases))
