import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hjlab import interval
from hjlab.interval import IntervalValue, exp_bounds, iv, pi_bounds, round_dyadic, sqrt_bounds
from hjlab.soundness import eval_interval, random_expression, soundness_trials

fractions = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**6)


def mp(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def test_round_dyadic_brackets():
    x = Fraction(1, 3)
    lo, hi = round_dyadic(x, 20, up=False), round_dyadic(x, 20, up=True)
    assert lo < x < hi
    assert (hi - lo) <= Fraction(1, 2**18)
    assert round_dyadic(Fraction(3, 4), 20, up=True) == Fraction(3, 4)


@pytest.mark.parametrize("prec", [32, 64, 96, 256, 1024])
def test_pi_enclosure(prec):
    lo, hi = pi_bounds(prec)
    with mpmath.workdps(400):
        assert mp(lo) <= mpmath.pi <= mp(hi)
        assert mp(hi - lo) < mpmath.mpf(2) ** (-prec + 4)


@pytest.mark.parametrize("x", ["-25/2", "0", "1", "-1", "7/3", "-100000000000", "40"])
def test_exp_enclosure(x):
    x = Fraction(x)
    lo, hi = exp_bounds(x, 96)
    with mpmath.workdps(120):
        ref = mpmath.exp(mp(x))
        assert mp(lo) <= ref <= mp(hi)


def test_exp_of_minus_twelve_and_a_half():
    v = IntervalValue.exact(Fraction(-25, 2)).exp()
    assert v.width < Fraction(1, 10**30)
    assert float(v.mid) == pytest.approx(3.726653172078671e-06, rel=1e-12)


def test_exp_of_huge_negative_is_tiny_and_sound():
    v = IntervalValue.exact(-10**11).exp()
    assert v.lo == 0 and 0 < v.hi < Fraction(1, 10**60)


def test_exp_overflow_guard():
    with pytest.raises(OverflowError):
        exp_bounds(Fraction(2**30), 64)


@given(st.fractions(min_value=0, max_value=10**9, max_denominator=10**6), st.sampled_from([32, 64, 128]))
def test_sqrt_enclosure(a, prec):
    lo, hi = sqrt_bounds(a, prec)
    assert lo * lo <= a <= hi * hi
    assert lo >= 0


@given(fractions, fractions, st.sampled_from(["add", "sub", "mul", "div"]))
def test_rational_ops_enclose_exact_result(a, b, op):
    x, y = iv(a, 48), iv(b, 48)
    if op == "div" and b == 0:
        with pytest.raises(ZeroDivisionError):
            x / y
        return
    exact = {"add": a + b, "sub": a - b, "mul": a * b, "div": a / b if b else None}[op]
    out = {"add": x + y, "sub": x - y, "mul": x * y, "div": x / y if b else None}[op]
    assert out.contains(exact)


@given(st.integers(0, 2**32))
def test_random_expressions_tighten_with_precision(seed):
    expr = random_expression(random.Random(seed), depth=3)
    coarse, fine = eval_interval(expr, 40), eval_interval(expr, 160)
    assert fine.width <= coarse.width
    assert max(coarse.lo, fine.lo) <= min(coarse.hi, fine.hi)


def test_sqrt_rejects_negative_part():
    with pytest.raises(ValueError):
        IntervalValue(-1, 1).sqrt()


def test_reciprocal_rejects_zero():
    with pytest.raises(ZeroDivisionError):
        IntervalValue(-1, 1).reciprocal()


def test_certainty_predicates():
    assert IntervalValue(1, 2).certainly_positive()
    assert IntervalValue(-2, -1).certainly_negative()
    v = IntervalValue(-1, 1)
    assert not v.certainly_positive() and not v.certainly_negative()


def test_decimal_strings_round_outward():
    v = IntervalValue(Fraction(1, 3), Fraction(2, 3))
    lo, hi = v.to_strings(5)
    assert mpmath.mpf(lo) <= mpmath.mpf(1) / 3 and mpmath.mpf(hi) >= mpmath.mpf(2) / 3
    assert IntervalValue.exact(Fraction(9999999, 1000)).to_strings(3) == ["9.99e+3", "1.00e+4"]


def test_soundness_small_batch():
    r = soundness_trials(300, seed=11)
    assert r["failures"] == 0


def test_soundness_harness_catches_a_wrong_enclosure(monkeypatch):
    good = interval.pi_bounds
    shift = Fraction(1, 2**60)
    monkeypatch.setattr(interval, "pi_bounds", lambda prec: tuple(x + shift for x in good(prec)))
    r = soundness_trials(300, seed=11)
    assert r["failures"] > 0
