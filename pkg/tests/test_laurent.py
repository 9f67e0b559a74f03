from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from efapprox.errors import PoleAtZero
from efapprox.laurent import (LaurentMatrix, LaurentPoly, RatFunc, poly_gcd,
                              taylor_shift_one)


def lp(low, coeffs):
    return LaurentPoly(low, coeffs)


small_polys = st.builds(
    lp,
    st.integers(min_value=-4, max_value=4),
    st.lists(st.fractions(min_value=-9, max_value=9, max_denominator=12),
             min_size=0, max_size=6))


def test_normalization_trims_boundary_zeros():
    p = lp(-2, [0, 1, 0, 2, 0])
    assert p.low == -1
    assert p.coeffs == (F(1), F(0), F(2))
    assert lp(5, [0, 0]).is_zero()


def test_derivative_of_inverse_power():
    assert lp(-1, [1]).differentiate() == lp(-2, [-1])


def test_product_difference_of_squares():
    assert lp(0, [1, 1]) * lp(0, [-1, 1]) == lp(0, [-1, 0, 1])


def test_monomial_evaluation_at_one():
    # tau z^i at 1 must give back tau exactly
    assert LaurentPoly.monomial(7, 3).evaluate_at(1) == 7
    assert LaurentPoly.monomial(F(5, 2), -4).evaluate_at(1) == F(5, 2)


def test_pole_at_zero():
    with pytest.raises(PoleAtZero):
        lp(-1, [1]).evaluate_at(0)
    assert lp(0, [3, 1]).evaluate_at(0) == 3


@given(small_polys, small_polys, small_polys)
@settings(max_examples=100)
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) * c == a * c + b * c
    assert a * (b * c) == (a * b) * c


@given(small_polys, small_polys)
@settings(max_examples=100)
def test_derivative_leibniz(a, b):
    lhs = (a * b).differentiate()
    rhs = a.differentiate() * b + a * b.differentiate()
    assert lhs == rhs


@given(small_polys, st.fractions(min_value=-5, max_value=5, max_denominator=7))
@settings(max_examples=100)
def test_evaluation_is_ring_hom(p, q):
    if q == 0:
        return
    other = lp(0, [1, 2])
    assert (p * other).evaluate_at(q) == p.evaluate_at(q) * other.evaluate_at(q)
    assert (p + other).evaluate_at(q) == p.evaluate_at(q) + other.evaluate_at(q)


def test_truncate_and_drop():
    p = lp(-1, [1, 2, 3, 4])
    assert p.truncate(1) == lp(-1, [1, 2, 3])
    assert p.drop_below(1) == lp(1, [3, 4])
    assert p.truncate(-5).is_zero()


def test_taylor_shift_one():
    # (z)^2 -> (1+u)^2 = 1 + 2u + u^2
    assert taylor_shift_one(lp(0, [0, 0, 1])) == lp(0, [1, 2, 1])
    p = lp(0, [3, -1, 2, 5])
    shifted = taylor_shift_one(p)
    for u in (F(0), F(1, 3), F(-2)):
        assert shifted.evaluate_at(u) == p.evaluate_at(1 + u)


def test_poly_gcd_and_ratfunc_reduction():
    a = lp(0, [-1, 0, 1])      # z^2 - 1
    b = lp(0, [1, 1])          # z + 1
    g = poly_gcd(a, b)
    assert g == lp(0, [1, 1])
    r = RatFunc(a, b)
    assert r.is_laurent()
    assert r.as_laurent() == lp(0, [-1, 1])


def test_ratfunc_series_geometric():
    r = RatFunc(LaurentPoly.one(), lp(0, [1, -1]))  # 1/(1-z)
    assert r.series(5) == lp(0, [1] * 6)
    rz = RatFunc(LaurentPoly.one(), lp(1, [1, -1]))  # 1/(z - z^2)
    assert rz.series(2) == lp(-1, [1, 1, 1, 1])


def test_ratfunc_derivative_quotient_rule():
    r = RatFunc(lp(0, [0, 1]), lp(0, [1, 1]))  # z/(1+z)
    d = r.differentiate()
    # d/dz z/(1+z) = 1/(1+z)^2
    assert d == RatFunc(LaurentPoly.one(), lp(0, [1, 2, 1]))


def test_matrix_apply_and_transpose():
    z = LaurentPoly.z()
    m = LaurentMatrix.from_rows([[z, LaurentPoly.one()],
                                 [LaurentPoly.zero(), z * z]])
    v = m.apply_to_vector([LaurentPoly.one(), z])
    assert v[0] == z + z and v[1] == lp(3, [1])
    assert m.transpose().entry(0, 1).is_zero()
    assert m.evaluate_at(2) == [[F(2), F(1)], [F(0), F(4)]]
