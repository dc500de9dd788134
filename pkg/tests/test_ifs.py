from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracframes.errors import (AtomBudgetExceeded, CongruentDigitsError,
                               DuplicateDigitError, MissingZeroDigitError,
                               NotExpansiveError)
from fracframes.ifs import (AtomicMeasure, IfsSystem, attractor_box, fourier_transform,
                            fourier_transform_array, fourier_vanishes_exact,
                            level_measure, mask, mask_array, mask_vanishes_exact,
                            new_ifs, truncation_depth)

JP = new_ifs([[4]], [0, 2])
BIN = new_ifs([[2]], [0, 1])
SIX = new_ifs([[6]], [0, 2, 4])
PLANE = new_ifs([[2, 1], [0, 2]], [[0, 0], [1, 0], [0, 1], [1, 1]])


def test_new_ifs_validation():
    assert JP.N == 2 and BIN.N == 2
    with pytest.raises(CongruentDigitsError):
        new_ifs([[3]], [0, 3])
    with pytest.raises(NotExpansiveError):
        new_ifs([[1]], [0])
    with pytest.raises(MissingZeroDigitError):
        new_ifs([[4]], [1, 2])
    with pytest.raises(DuplicateDigitError):
        new_ifs([[4]], [0, 2, 2])


def test_ifs_json_round_trip():
    for s in (JP, SIX, PLANE):
        assert IfsSystem.from_dict(s.to_dict()) == s


def test_mask_examples():
    assert mask(JP, 0) == 1
    assert abs(mask(JP, 0.25)) < 1e-15
    assert mask(JP, Fraction(1, 4)) == 0
    assert abs(mask(SIX, Fraction(1, 6))) < 1e-15


def test_mask_vanishes_exact_examples():
    assert mask_vanishes_exact(JP, Fraction(1, 4))
    assert not mask_vanishes_exact(JP, Fraction(1, 2))
    assert mask_vanishes_exact(SIX, Fraction(5, 6))
    # zero set of the three-digit mask: (6k + j)/6 with j in {1, 2, 4, 5}
    for k in range(-3, 4):
        for j in range(6):
            assert mask_vanishes_exact(SIX, Fraction(6 * k + j, 6)) == (j in (1, 2, 4, 5))


def test_fourier_transform_examples():
    assert fourier_transform(JP, 0) == pytest.approx(1)
    assert abs(fourier_transform(JP, 1)) < 1e-12
    assert abs(fourier_transform(JP, 4)) < 1e-12
    with pytest.raises(ValueError):
        fourier_transform(JP, 1, tol=0)


def test_fourier_transform_lebesgue_closed_form():
    # the binary system gives Lebesgue measure on [0, 1]
    for t in (0.3, 1.7, -2.2, 5.5):
        expected = (np.exp(2j * np.pi * t) - 1) / (2j * np.pi * t)
        assert fourier_transform(BIN, t) == pytest.approx(expected, abs=1e-10)


def test_fourier_shifts_match_direct_evaluation():
    t = np.array([[0.37]])
    shifts = [0, 3, 12, 39, -45]
    vals = fourier_transform_array(JP, t, shifts=shifts)
    for s, v in zip(shifts, vals):
        assert v == pytest.approx(fourier_transform(JP, 0.37 - s), abs=1e-10)
    T = np.array([[0.1, -0.4]])
    vals = fourier_transform_array(PLANE, T, shifts=[(0, 0), (3, -2)])
    direct = fourier_transform_array(PLANE, T - np.array([[3, -2]]))
    assert vals[1] == pytest.approx(direct[0], abs=1e-10)


def test_fourier_vanishes_exact_examples():
    assert fourier_vanishes_exact(JP, 1, 3)
    assert not fourier_vanishes_exact(JP, 0, 10)
    assert not fourier_vanishes_exact(SIX, 0, 10)
    assert fourier_vanishes_exact(SIX, -4, 5)
    with pytest.raises(ValueError):
        fourier_vanishes_exact(JP, 1, 0)


def test_level_measure_examples():
    m1 = level_measure(JP, 1)
    assert m1.as_dict() == {(Fraction(0),): Fraction(1, 2), (Fraction(1, 2),): Fraction(1, 2)}
    m2 = level_measure(JP, 2)
    assert sorted(p[0] for p in m2.points) == [0, Fraction(1, 8), Fraction(1, 2), Fraction(5, 8)]
    assert set(m2.masses) == {Fraction(1, 4)}
    m3 = level_measure(BIN, 3)
    assert sorted(p[0] for p in m3.points) == [Fraction(j, 8) for j in range(8)]
    with pytest.raises(AtomBudgetExceeded):
        level_measure(JP, 5, budget=16)


def test_atom_budget_env(monkeypatch):
    monkeypatch.setenv("FRACFRAMES_ATOM_BUDGET", "8")
    level_measure(JP, 3)
    with pytest.raises(AtomBudgetExceeded):
        level_measure(JP, 4)


def test_atomic_measure_validation_and_csv():
    with pytest.raises(ValueError):
        AtomicMeasure((((Fraction(0),), Fraction(1, 2)),))
    with pytest.raises(ValueError):
        AtomicMeasure((((Fraction(0),), Fraction(1, 2)), ((Fraction(0),), Fraction(1, 2))))
    csv = level_measure(JP, 1).to_csv().splitlines()
    assert csv == ["x0,mass", "0,1/2", "1/2,1/2"]


def test_attractor_box():
    assert attractor_box(JP) == (0, Fraction(2, 3))
    assert attractor_box(BIN) == (0, 1)
    assert attractor_box(SIX) == (0, Fraction(4, 5))
    lo, hi = attractor_box(new_ifs([[-2]], [0, 1]))
    assert (lo, hi) == (Fraction(-2, 3), Fraction(1, 3))


def test_level_measure_inside_attractor_box():
    lo, hi = attractor_box(SIX)
    for p in level_measure(SIX, 4).points:
        assert lo <= p[0] <= hi


def test_truncation_depth_grows_with_argument():
    assert truncation_depth(JP, 1.0, 1e-12) >= 8
    assert truncation_depth(JP, 1e6, 1e-12) > truncation_depth(JP, 1.0, 1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(-50, 50), st.integers(-20, 20))
def test_mask_bounded_and_periodic(t, z):
    for s in (JP, SIX):
        v = mask(s, t)
        assert abs(v) <= 1 + 1e-12
        assert mask(s, t + z) == pytest.approx(v, abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.integers(-400, 400), st.integers(1, 200))
def test_exact_mask_zero_matches_numeric(p, q):
    t = Fraction(p, q)
    for s in (JP, SIX, BIN):
        assert mask_vanishes_exact(s, t) == (abs(mask(s, float(t))) < 1e-9)


@pytest.mark.parametrize("sys", [JP, SIX, PLANE], ids=["quarter", "six", "plane"])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_level_measure_invariance(sys, k):
    # (1/N) sum_b (level k) o tau_b^{-1} equals level k + 1
    mu = level_measure(sys, k)
    pushed: dict = {}
    for p, m in mu.atoms:
        for b in sys.B:
            y = sys.R.solve(tuple(x + c for x, c in zip(p, b)))
            pushed[y] = pushed.get(y, 0) + m / sys.N
    assert pushed == level_measure(sys, k + 1).as_dict()


def test_level_fourier_converges_to_transform():
    ts = np.linspace(-10, 10, 41)
    errs = []
    for k in range(2, 7):
        mu = level_measure(JP, k)
        errs.append(max(abs(mu.fourier(t) - fourier_transform(JP, t)) for t in ts))
    assert errs[-1] < errs[0]
    assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))


def test_mask_array_matches_scalar():
    X = np.array([[0.1, 0.2], [0.5, -0.3]])
    vals = mask_array(PLANE, X)
    assert vals[1] == pytest.approx(mask(PLANE, [0.5, -0.3]))
