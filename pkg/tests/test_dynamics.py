import json
from fractions import Fraction

import numpy as np
import pytest

from conftest import load
from fracframes.candidate import (ExactWeight, check_isometry, check_two_digit_family,
                                  make_integer_base_family, new_candidate)
from fracframes.dynamics import (candidate_points, completeness_verdict, extreme_cycles,
                                 find_minimal_invariant_sets, transition_targets,
                                 transition_weight_total)
from fracframes.errors import IsometryError, UnsupportedError
from fracframes.ifs import new_ifs
from fracframes.verify import orthogonality_witness

F = Fraction
H = ExactWeight.sqrt_recip(2)


def _targets(c, t):
    return {(e.label, e.target) for e in transition_targets(c, t)}


def test_transition_examples():
    c = load("quarter_incomplete")
    assert _targets(c, -1) == {(3, F(-1)), (15, F(-4))}
    assert _targets(c, -4) == {(0, F(-1))}
    assert (0, F(0)) in _targets(load("quarter_parseval"), 0)
    e = next(e for e in transition_targets(load("quarter_parseval"), 0) if e.label == 0)
    assert e.weight == pytest.approx(1.0)
    with pytest.raises(UnsupportedError):
        transition_targets(load("planar"), 0)


def test_candidate_points_examples():
    assert candidate_points(load("quarter_parseval")) == [F(k, 2) for k in range(-6, 1)]
    assert candidate_points(new_candidate(([[4]], [0, 2]), [0], [1])) == [F(0)]
    assert candidate_points(load("quarter_incomplete")) == [F(k, 2) for k in range(-10, 1)]


def test_invariant_set_examples():
    assert find_minimal_invariant_sets(load("quarter_parseval")).trivial_only
    rep = find_minimal_invariant_sets(load("quarter_incomplete"))
    assert frozenset({F(-1), F(-4)}) in rep.minimal_sets
    rep = find_minimal_invariant_sets(load("binary_two_cycle"))
    assert frozenset({F(-1), F(-2)}) in rep.minimal_sets
    assert frozenset({F(-3)}) not in rep.minimal_sets
    assert find_minimal_invariant_sets(load("three_digit")).trivial_only


def test_verdict_examples():
    v = completeness_verdict(load("quarter_parseval"))
    assert v.is_parseval and v.witness is None
    v = completeness_verdict(load("quarter_incomplete"))
    assert v.status == "Incomplete" and v.witness in (F(-1), F(-4))
    assert "-1" in v.certificate
    assert completeness_verdict(load("three_digit")).is_parseval
    with pytest.raises(IsometryError):
        completeness_verdict(new_candidate(([[4]], [0, 2]), [0], [1]))
    with pytest.raises(UnsupportedError):
        completeness_verdict(new_candidate(([[-4]], [0, 2]), [0, 1], [1, 1]))


def test_extreme_cycle_examples():
    sys = new_ifs([[4]], [0, 2])
    cyc = extreme_cycles(sys, [0, 3])
    assert any(z.points == (F(-1),) and z.digits == (3,) for z in cyc)
    cyc = extreme_cycles(sys, [0, 9])
    assert any(z.points == (F(-3),) for z in cyc)
    cyc = extreme_cycles(sys, [0])
    assert [(z.points, z.digits) for z in cyc] == [((F(0),), (0,))]
    # two-point extreme cycle of the binary example
    cyc = extreme_cycles(load("binary_two_cycle"))
    assert any(set(z.points) == {F(-1), F(-2)} for z in cyc)


def test_transition_graph_exports():
    rep = find_minimal_invariant_sets(load("quarter_incomplete"))
    dot = rep.graph.to_dot()
    assert dot.startswith("digraph") and '"-1" -> "-4"' in dot
    data = json.loads(rep.graph.dumps())
    assert "-4" in data["nodes"] and all(e["weight"] > 0 for e in data["edges"])


def test_eliminations_recorded():
    rep = find_minimal_invariant_sets(load("quarter_parseval"))
    for t, e in rep.eliminated.items():
        assert e.source == t and e.target not in rep.minimal_sets[0]


# --------------------------------------------------------------- properties

ADMISSIBLE = ["quarter_parseval", "quarter_incomplete", "binary_two_cycle", "three_digit",
              "base3_family", "base3_lebesgue"]


@pytest.mark.parametrize("name", ADMISSIBLE)
def test_weights_sum_to_one_on_candidate_points(name):
    c = load(name)
    for t in candidate_points(c):
        assert transition_weight_total(c, t) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("name", ADMISSIBLE)
def test_minimal_sets_structure(name):
    c = load(name)
    rep = find_minimal_invariant_sets(c)
    lo, hi = min(candidate_points(c)), max(candidate_points(c))
    R = c.sys.scalar
    assert any(F(0) in s for s in rep.minimal_sets)
    for s in rep.minimal_sets:
        for t in s:
            assert lo <= t <= hi
            assert all((t * b[0]).denominator == 1 for b in c.sys.B)
            out = transition_targets(c, t)
            assert all(e.target in s for e in out)
            labels = [e.label for e in out]
            assert all((l - labels[0]) % R == 0 for l in labels)
            mass = sum(c.alpha_sq[c.index[(l,)]] for l in c.labels_1d
                       if (l - labels[0]) % R == 0)
            assert float(mass) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("name", ADMISSIBLE)
def test_incomplete_witness_is_orthogonal(name):
    c = load(name)
    v = completeness_verdict(c)
    if v.is_parseval:
        return
    assert v.witness in v.report.nontrivial_sets[0]
    assert orthogonality_witness(c, v.witness, max_len=5, depth=8)


def test_random_two_digit_verdicts_consistent():
    rng = np.random.default_rng(5)
    H2 = ExactWeight.sqrt_recip(2)
    seen = {"Parseval": 0, "Incomplete": 0}
    pairs = [(3, 15)] + [tuple(rng.choice(np.arange(1, 40, 2), size=2, replace=False))
                         for _ in range(60)]
    for l1, l2 in pairs:
        c = new_candidate(([[4]], [0, 2]), [0, int(l1), int(l2)], [1, H2, H2])
        assert check_isometry(c).ok
        v = completeness_verdict(c)
        seen[v.status] += 1
        if not v.is_parseval:
            assert orthogonality_witness(c, v.witness, max_len=3, depth=8)
        if check_two_digit_family(c).parseval_sufficient:
            assert v.is_parseval
    assert seen["Parseval"] and seen["Incomplete"]


def test_base3_family_verdicts():
    assert completeness_verdict(make_integer_base_family(3, [[0], [-1]])).is_parseval
