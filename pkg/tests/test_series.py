import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ktree_profile.series import RationalSeries

fracs = st.fractions(min_value=-3, max_value=3, max_denominator=7)


def test_binomial_matches_math_comb():
    s = RationalSeries.binomial(1, 5, 7)
    assert s.coeffs == [math.comb(5, m) for m in range(6)] + [0, 0]


@given(fracs, fracs)
@settings(max_examples=40, deadline=None)
def test_binomial_exponents_add(a, b):
    x = RationalSeries.binomial(1, a, 8) * RationalSeries.binomial(1, b, 8)
    assert x == RationalSeries.binomial(1, a + b, 8)


@given(st.lists(fracs, min_size=1, max_size=9).filter(lambda c: c[0] != 0))
@settings(max_examples=40, deadline=None)
def test_reciprocal(cs):
    s = RationalSeries(cs)
    one = s * s.reciprocal()
    assert one == RationalSeries.constant(1, s.order)
    assert (s / s) == one


def test_exp_of_z():
    e = RationalSeries([0, 1], order=8).exp()
    assert e.coeffs == [F(1, math.factorial(m)) for m in range(9)]
    with pytest.raises(ValueError):
        RationalSeries([1, 1]).exp()


def test_exp_of_log():
    # log(1+z) = sum (-1)^(m+1) z^m / m
    log1p = RationalSeries([0] + [F((-1) ** (m + 1), m) for m in range(1, 10)])
    assert log1p.exp() == RationalSeries([1, 1], order=9)


def test_derivative_integral_roundtrip():
    s = RationalSeries([3, F(1, 2), -2, 7, F(5, 3)])
    assert s.derivative().coeffs == [F(1, 2), -4, 21, F(20, 3)]
    assert s.derivative().integral() == RationalSeries([0, F(1, 2), -2, 7])
    assert (s - 3).truncate(3) == s.derivative().integral()


def test_orders_and_scalars():
    a = RationalSeries([1, 2, 3])
    b = RationalSeries([1, 1])
    assert (a + b).order == 1
    assert (2 + a).coeffs == [3, 2, 3] and (1 - a).coeffs == [0, -2, -3]
    assert (a * 3).coeffs == [3, 6, 9] and (a / 2).coeffs == [F(1, 2), 1, F(3, 2)]
    assert (b.truncate(4) ** 4).coeffs == [1, 4, 6, 4, 1]
    with pytest.raises(ValueError):
        a ** -1
    with pytest.raises(ZeroDivisionError):
        RationalSeries([0, 1]).reciprocal()


def test_float_mode_and_evaluate():
    s = RationalSeries.binomial(1, -1, 30)
    assert s.evaluate(F(1, 2)) == F(2, 3) * (1 + F(1, 2**31))
    f = s.to_float()
    assert not f.exact and abs(f.evaluate(0.5) - 2 / 3) < 1e-9
    assert RationalSeries([1.5, 2], exact=False).coeffs == [1.5, 2.0]
