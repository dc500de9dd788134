"""Acceptance criteria, one test per criterion.

Each test is tagged ``criterion(n)``; the terminal summary prints one
PASS/FAIL line per criterion (see conftest.py).
"""

import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import fixture_path, load
from corpus import corpus
from fracframes.candidate import (ExactWeight, check_isometry, check_parseval_on_delta,
                                  check_three_digit_family, check_two_digit_family,
                                  check_vanishing_sums, make_integer_base_family,
                                  new_candidate, transfer_operator)
from fracframes.cli import main
from fracframes.dilation import build_a_matrix, build_dilation, project_cuntz_word
from fracframes.dynamics import (completeness_verdict, extreme_cycles,
                                 find_minimal_invariant_sets)
from fracframes.ifs import fourier_vanishes_exact, new_ifs
from fracframes.verify import (bessel_partial_sum, enumerate_representations,
                               frequency_words, level_k_parseval, orthogonality_witness)

F = Fraction
H = ExactWeight.sqrt_recip(2)


class Clock:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.2f}s"


@pytest.mark.criterion(1, title="admissibility of the R=4, B={0,2}, L={0,3,9} candidate")
def test_criterion_1():
    with Clock(1.0):
        c = load("quarter_parseval")
        rep = check_isometry(c)
        assert rep.ok and rep.max_deviation < 1e-12
        v = completeness_verdict(c)
        assert v.status == "Parseval"
        assert v.report.minimal_sets == (frozenset({F(0)}),)


@pytest.mark.criterion(2, title="incompleteness of L={0,3,15}")
def test_criterion_2():
    with Clock(1.0):
        c = load("quarter_incomplete")
        rep = find_minimal_invariant_sets(c)
        assert set(rep.minimal_sets) == {frozenset({F(0)}), frozenset({F(-1), F(-4)})}
        v = completeness_verdict(c)
        assert v.status == "Incomplete"
        assert orthogonality_witness(c, -1, max_len=4, depth=8)
        # each certificate is an exact vanishing mask factor
        for a in frequency_words(c, 4):
            assert fourier_vanishes_exact(c.sys, -1 - a.frequency[0], 8)


@pytest.mark.criterion(3, title="two-cycle {-1,-2} for R=2, B={0,1}, L={0,1,3}")
def test_criterion_3():
    with Clock(1.0):
        c = load("binary_two_cycle")
        rep = find_minimal_invariant_sets(c)
        cycle = frozenset({F(-1), F(-2)})
        assert cycle in rep.minimal_sets
        inside = sorted((e.source, e.label, e.target) for e in rep.transitions
                        if e.source in cycle)
        assert inside == [(F(-2), 0, F(-1)), (F(-1), 1, F(-1)), (F(-1), 3, F(-2))]


@pytest.mark.criterion(4, title="three-digit R=6, B={0,2,4}, L={0,1,5,20} and its subsets")
def test_criterion_4():
    with Clock(5.0):
        c = load("three_digit")
        cond = check_three_digit_family(c).conditions
        assert [cond[k] for k in ("i", "ii", "iii", "iv", "v")] == [True] * 4 + [False]
        v = completeness_verdict(c)
        assert v.status == "Parseval" and v.report.trivial_only
        sys = new_ifs([[6]], [0, 2, 4])

        def nontrivial_cycles(cand):
            return {z.points for z in extreme_cycles(cand) if z.points != (F(0),)}

        c1 = new_candidate(sys, [0, 1, 5], [1, 1, 1])
        assert completeness_verdict(c1).status == "Incomplete"
        assert nontrivial_cycles(c1) == {(F(-1),)}
        c2 = new_candidate(sys, [0, 1, 20], [1, 1, 1])
        assert completeness_verdict(c2).status == "Incomplete"
        assert nontrivial_cycles(c2) == {(F(-4),)}
        for alphas in ([1, 1, 1], [1, H, H]):
            c3 = new_candidate(sys, [0, 5, 20], alphas)
            assert (not check_isometry(c3).ok
                    or orthogonality_witness(c3, 1, max_len=3, depth=6))
            assert orthogonality_witness(c3, 1, max_len=3, depth=6)


@pytest.mark.criterion(5, title="level-k exact Parseval, k = 1..4")
def test_criterion_5():
    with Clock(10.0):
        for name in ("quarter_parseval", "three_digit"):
            c = load(name)
            for k in range(1, 5):
                r = level_k_parseval(c, k)
                assert r.ok and r.deviation <= 1e-10, (name, k, r.deviation)


@pytest.mark.criterion(6, title="middle-third infeasibility, exit 1 with reason")
def test_criterion_6(capsys):
    with Clock(1.0):
        sys = new_ifs([[3]], [0, 2])
        for L in ([0, 1], [0, 2], [0, 5, 7], [0, -4, 13, 40]):
            c = new_candidate(sys, L, [1] + [ExactWeight.sqrt_recip(len(L) - 1)] * (len(L) - 1))
            rep = check_vanishing_sums(c)
            assert not rep.any_label_possible and not rep.ok
        code = main(["validate", str(fixture_path("middle_third"))])
        out = json.loads(capsys.readouterr().out)
        assert code == 1
        assert "vanishing_sum_infeasible" in [r["code"] for r in out["reasons"]]


@pytest.mark.criterion(7, title="dilation a-matrix and word projections")
def test_criterion_7():
    D = build_dilation(load("quarter_parseval"))
    a = build_a_matrix(D)
    assert a.unitarity_deviation < 1e-12
    assert np.all(a.values[0] == 1)
    s = 1 / math.sqrt(2)
    assert np.max(np.abs(a.row_means[:, 0] - [1, s, s, 0])) < 1e-12
    rng = np.random.default_rng(7)
    for _ in range(20):
        k = int(rng.integers(1, 4))
        word = [int(p) for p in rng.integers(0, D.size, size=k)]
        wp = project_cuntz_word(D, word, level=5, a=a)
        assert wp.quadrature_deviation < 1e-8, (word, wp)
        coef = np.prod([D.padded_alphas[p] for p in word])
        assert abs(wp.coefficient - coef) < 1e-15


@pytest.mark.criterion(8, title="base-3 representation identity for |n| <= 50")
def test_criterion_8():
    with Clock(10.0):
        fam = make_integer_base_family(3, [[0, 3], [-1]])
        assert set(fam.alpha_sq_exact) <= {Fraction(1), Fraction(1, 2)}
        for n in range(-50, 51):
            rep = enumerate_representations(fam, n)
            assert isinstance(rep.total, Fraction) and rep.total == 1, n


def _two_digit_sweep():
    labels = [l for l in range(-30, 31) if l]
    for R in range(2, 9):
        for b in range(1, 9):
            if b % R == 0:
                continue
            sys = new_ifs([[R]], [0, b])
            for l in labels:
                yield new_candidate(sys, [0, l], [1, 1])
            for i, l1 in enumerate(labels):
                for l2 in labels[i + 1:]:
                    yield new_candidate(sys, [0, l1, l2], [1, H, H])


@pytest.mark.criterion(9, title="property suites")
def test_criterion_9_three_way_equivalence():
    cands = corpus(seed=2024, n=36)
    assert len(cands) >= 30
    rng = np.random.default_rng(0)
    for c in cands:
        pts = rng.uniform(-20, 20, size=(100, c.d))
        fixed = transfer_operator(c, lambda y: np.ones(len(y)))(pts)
        iso = check_isometry(c).ok
        assert iso == check_parseval_on_delta(c)
        assert iso == bool(np.max(np.abs(fixed - 1)) < 1e-10)


@pytest.mark.criterion(9, title="property suites")
def test_criterion_9_bessel():
    names = ["quarter_parseval", "quarter_incomplete", "binary_two_cycle", "three_digit",
             "base3_family", "base3_lebesgue"]
    cands = [load(n) for n in names]
    cands += [c for c in corpus(seed=99, n=30) if c.d == 1 and check_isometry(c).ok]
    rng = np.random.default_rng(1)
    for c in cands:
        max_len = max(1, int(math.log(600) / math.log(c.M)))
        for t in rng.uniform(-25, 25, size=100):
            sums = bessel_partial_sum(c, t, max_len)
            assert np.all(np.diff(sums) >= -1e-15)
            assert sums[-1] <= 1 + 1e-9


@pytest.mark.criterion(9, title="property suites")
def test_criterion_9_two_digit_sweep():
    n = 0
    for c in _two_digit_sweep():
        assert check_two_digit_family(c).isometry_conditions == check_isometry(c).ok, (
            c.sys.R, c.sys.B, c.L)
        n += 1
    assert n > 50_000
