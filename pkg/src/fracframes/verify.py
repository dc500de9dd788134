"""Frame frequencies, finite-level Parseval checks, Bessel partial sums,
orthogonality certificates and base-R representation counts."""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .candidate import DEFAULT_TOL, FrameCandidate, atomic_frame_operator
from .errors import AtomBudgetExceeded, UnsupportedError
from .exact import IntVec, as_rational_vector
from .ifs import atom_budget, fourier_transform_array, fourier_vanishes_exact, level_measure


@dataclass(frozen=True)
class FrequencyAtom:
    word: tuple[IntVec, ...]
    frequency: IntVec
    weight: complex


def _frequency(c: FrameCandidate, word: Sequence[IntVec]) -> IntVec:
    freq = (0,) * c.d
    for l in reversed(word):
        freq = tuple(x + y for x, y in zip(c.sys.RT.matvec(freq), l))
    return freq


def _weight(c: FrameCandidate, word: Sequence[IntVec]) -> complex:
    w = 1 + 0j
    for l in word:
        w *= c.alpha(l)
    return w


def word_weight_sq(c: FrameCandidate, word: Sequence[IntVec]) -> Fraction | None:
    """Exact ``prod |alpha|^2`` when every weight has an exact squared modulus."""
    out = Fraction(1)
    for l in word:
        e = c.alpha_sq_exact[c.index[l]]
        if e is None:
            return None
        out *= e
    return out


def frequency_words(c: FrameCandidate, max_len: int) -> list[FrequencyAtom]:
    """All words of length <= ``max_len`` with nonzero last label, plus the empty
    word, in length-lexicographic order (labels ordered as given)."""
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    zero = (0,) * c.d
    out = [FrequencyAtom((), zero, 1 + 0j)]
    for k in range(1, max_len + 1):
        for word in itertools.product(c.L, repeat=k):
            if word[-1] == zero:
                continue
            out.append(FrequencyAtom(word, _frequency(c, word), _weight(c, word)))
    return out


def frequency_words_csv(atoms: Sequence[FrequencyAtom]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["word", "frequency", "weight_re", "weight_im"])
    for a in atoms:
        word = " ".join(",".join(map(str, l)) for l in a.word)
        w.writerow([word, ",".join(map(str, a.frequency)),
                    repr(a.weight.real), repr(a.weight.imag)])
    return buf.getvalue()


@dataclass(frozen=True)
class LevelParseval:
    k: int
    ok: bool
    deviation: float


def level_budget_check(c: FrameCandidate, k: int, budget: int | None = None) -> int:
    """Raise AtomBudgetExceeded unless the ``N^k`` atoms and ``M^k`` words of
    level ``k`` fit in the budget; returns the budget used."""
    if k < 1:
        raise ValueError("k must be >= 1")
    budget = atom_budget() if budget is None else budget
    if c.sys.N**k > budget:
        raise AtomBudgetExceeded(f"{c.sys.N}**{k} atoms exceed the budget {budget}")
    if c.M**k > budget:
        raise AtomBudgetExceeded(f"{c.M}**{k} frame vectors exceed the budget {budget}")
    return budget


def level_k_parseval(c: FrameCandidate, k: int, tol: float = DEFAULT_TOL,
                     budget: int | None = None) -> LevelParseval:
    """Frame operator of ``{(prod alpha) e_lambda(word)}`` over all ``M^k`` words of
    length ``k`` on the level-``k`` atomic measure, compared with the identity."""
    budget = level_budget_check(c, k, budget)
    mu = level_measure(c.sys, k, budget)
    words = list(itertools.product(c.L, repeat=k))
    S = atomic_frame_operator(mu.points, mu.masses,
                              [_frequency(c, w) for w in words],
                              [_weight(c, w) for w in words])
    dev = float(np.max(np.abs(S - np.eye(len(mu)))))
    return LevelParseval(k, dev <= tol, dev)


def level_parseval_csv(results: Sequence[LevelParseval]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "deviation"])
    for r in results:
        w.writerow([r.k, repr(r.deviation)])
    return buf.getvalue()


def bessel_partial_sum(c: FrameCandidate, t, max_len: int,
                       tol: float = 1e-12) -> np.ndarray:
    """``sum |weight|^2 |mu_hat(t - lambda)|^2`` over frame frequencies with word
    length <= n, for n = 0..max_len."""
    atoms = frequency_words(c, max_len)
    t = np.atleast_1d(np.asarray(t, dtype=float)).reshape(1, c.d)
    vals = fourier_transform_array(c.sys, t, tol, shifts=[a.frequency for a in atoms])
    terms = np.abs(np.array([a.weight for a in atoms])) ** 2 * np.abs(vals) ** 2
    lengths = np.array([len(a.word) for a in atoms])
    return np.array([terms[lengths <= n].sum() for n in range(max_len + 1)])


def orthogonality_witness(c: FrameCandidate, w, max_len: int, depth: int) -> bool:
    """Exact certificate that ``e_w`` is orthogonal to every frame vector whose
    word has length <= ``max_len``."""
    w = as_rational_vector(w, c.d)
    for a in frequency_words(c, max_len):
        t = tuple(x - y for x, y in zip(w, a.frequency))
        if not fourier_vanishes_exact(c.sys, t, depth):
            return False
    return True


# ------------------------------------------------------ representations


@dataclass(frozen=True)
class Representations:
    """Words ``l_0 .. l_k`` (no trailing zero) with ``l_0 + R l_1 + ... = n``.

    ``words`` lists those of length <= the enumeration cap.  ``total`` is the
    exact sum of ``prod |alpha|^2`` over *all* representations (possibly
    infinitely many), or ``None`` when weights are not exact or the series
    diverges.  ``complete`` is True when ``words`` is the full list.
    """

    n: int
    words: tuple[tuple[int, ...], ...]
    weights_sq: tuple
    complete: bool
    total: Fraction | None
    enumerated_total: float


def _remainder_graph(c: FrameCandidate, n: int):
    """States reachable from ``n`` under ``m -> (m - l)/R``; edges keep the label."""
    R = c.sys.scalar
    labels = c.labels_1d
    edges: dict[int, list[tuple[int, int]]] = {}
    todo = [n]
    while todo:
        m = todo.pop()
        if m in edges:
            continue
        edges[m] = []
        for l in labels:
            if (m - l) % R == 0:
                nxt = (m - l) // R
                edges[m].append((l, nxt))
                todo.append(nxt)
    return edges


def _can_finish(edges) -> set[int]:
    """Remainders from which a nonempty word with nonzero last label can end."""
    ok = {m for m, out in edges.items() if any(l == m and l != 0 for l, _ in out)}
    changed = True
    while changed:
        changed = False
        for m, out in edges.items():
            if m not in ok and any(nxt in ok for _, nxt in out):
                ok.add(m)
                changed = True
    return ok


def _exact_total(c: FrameCandidate, edges, good: set[int]) -> dict | None:
    """Total squared weight ``F(m)`` of nonempty words with value ``m``.

    ``F(m) = sum_l |alpha_l|^2 ([l = m != 0] + F((m - l)/R))`` over labels with
    ``R | m - l``.  The minimal nonnegative solution is the unique one when the
    recursion restricted to ``good`` is strictly contracting; otherwise the
    series diverges and ``None`` is returned.
    """
    sq = {}
    for i, l in enumerate(c.labels_1d):
        e = c.alpha_sq_exact[i]
        if e is None:
            return None
        sq[l] = e
    states = sorted(good)
    pos = {m: i for i, m in enumerate(states)}
    n = len(states)
    Q = np.zeros((n, n))
    A = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    b = [Fraction(0)] * n
    for m in states:
        i = pos[m]
        for l, nxt in edges[m]:
            if l == m and l != 0:
                b[i] += sq[l]
            if nxt in pos:
                A[i][pos[nxt]] -= sq[l]
                Q[i, pos[nxt]] += float(sq[l])
    if n and np.max(np.abs(np.linalg.eigvals(Q))) >= 1 - 1e-12:
        return None
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        b[col], b[piv] = b[piv], b[col]
        p = A[col][col]
        A[col] = [x / p for x in A[col]]
        b[col] /= p
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
                b[r] -= f * b[col]
    return {m: b[pos[m]] for m in states}


def enumerate_representations(c: FrameCandidate, n: int,
                              max_len: int = 24,
                              max_words: int = 10_000) -> Representations:
    """All frame words representing the integer ``n`` (d == 1).

    Enumeration follows ``n -> (n - l)/R`` over ``l`` with ``R | n - l``; only
    remainders from which a word can still end are explored.  The remainders
    reachable from ``n`` form a finite set, since
    ``|(m - l)/R| <= (|m| + max|L|)/|R|``.  A cycle among them means
    infinitely many representations: words are then listed up to
    ``max_len`` labels (and at most ``max_words`` of them) and the exact total
    comes from the linear recursion.
    """
    if c.d != 1:
        raise UnsupportedError("representations are implemented for d == 1 only")
    if abs(c.sys.scalar) < 2:
        raise UnsupportedError("need |R| >= 2")
    edges = _remainder_graph(c, n)
    good = _can_finish(edges)
    exact = {l: c.alpha_sq_exact[c.index[(l,)]] for l in c.labels_1d}
    approx = {l: abs(c.alpha((l,))) ** 2 for l in c.labels_1d}
    exact_ok = all(e is not None for e in exact.values())
    # (word, exact |weight|^2, float |weight|^2); weights are carried down the recursion
    found: list = [((), Fraction(1) if exact_ok else None, 1.0)] if n == 0 else []
    complete = True

    def rec(m: int, prefix: list[int], q, qf: float):
        nonlocal complete
        if len(prefix) >= max_len or len(found) >= max_words:
            complete = False
            return
        for l, nxt in edges[m]:
            q2 = q * exact[l] if exact_ok else None
            qf2 = qf * approx[l]
            if l == m and l != 0:
                if len(found) >= max_words:
                    complete = False
                    return
                found.append((tuple(prefix + [l]), q2, qf2))
            if nxt in good:
                rec(nxt, prefix + [l], q2, qf2)

    if n in good:
        rec(n, [], Fraction(1) if exact_ok else None, 1.0)
    found.sort(key=lambda f: (len(f[0]), f[0]))
    words = tuple(f[0] for f in found)
    wsq = tuple(f[1] for f in found)
    total = None
    if exact_ok:
        sol = _exact_total(c, edges, good)
        if sol is not None:
            total = Fraction(int(n == 0)) + sol.get(n, Fraction(0))
    enumerated = sum(f[2] for f in found)
    return Representations(n, words, wsq, complete, total, enumerated)


def representations_csv(rep: Representations) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["word", "weight_sq"])
    for word, q in zip(rep.words, rep.weights_sq):
        w.writerow([" ".join(map(str, word)), str(q)])
    return buf.getvalue()
