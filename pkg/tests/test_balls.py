from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from efapprox.balls import BallValue, log2_fraction
from efapprox.errors import BallDomainError

rationals = st.fractions(min_value=-1000, max_value=1000, max_denominator=997)


def test_exact_roundtrip():
    b = BallValue.exact(F(3, 7), 128)
    assert b.contains(F(3, 7))
    assert b.is_exact()


def test_compress_keeps_containment():
    b = BallValue.exact(F(1, 3), 64).compress()
    assert b.contains(F(1, 3))
    assert b.rad > 0
    assert b.rad < F(1, 2 ** 50)


@given(rationals, rationals)
@settings(max_examples=200)
def test_add_mul_containment(x, y):
    bx = BallValue.from_fraction(x, 96)
    by = BallValue.from_fraction(y, 96)
    assert (bx + by).contains(x + y)
    assert (bx - by).contains(x - y)
    assert (bx * by).contains(x * y)
    assert abs(bx).contains(abs(x))


@given(rationals, rationals)
@settings(max_examples=100)
def test_division_containment(x, y):
    bx = BallValue.from_fraction(x, 128)
    by = BallValue.from_fraction(y, 128)
    if by.contains_zero():
        with pytest.raises(BallDomainError):
            by.reciprocal()
    else:
        assert (bx / by).contains(x / y)


def test_floor_certified():
    assert BallValue.from_fraction(F(7, 2), 64).floor_certified() == 3
    assert BallValue.from_fraction(F(-7, 2), 64).floor_certified() == -4
    straddle = BallValue(F(3), F(1, 2), 64)
    assert straddle.floor_certified() is None


def test_radius_scales_with_precision():
    wide = BallValue.exact(F(1, 3), 32).compress()
    tight = BallValue.exact(F(1, 3), 256).compress()
    assert tight.rad < wide.rad


def test_interval_constructor_orders_endpoints():
    b = BallValue.from_interval(F(1), F(2), 64)
    assert b.contains(F(3, 2))
    with pytest.raises(ValueError):
        BallValue.from_interval(F(2), F(1), 64)


def test_log2_fraction_large_values():
    assert abs(log2_fraction(F(2 ** 300)) - 300.0) < 1e-9
    assert abs(log2_fraction(F(1, 2 ** 300)) + 300.0) < 1e-9
    assert abs(log2_fraction(F(3, 4)) - (-0.415037499)) < 1e-6
