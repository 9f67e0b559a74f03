import math
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from efapprox.balls import BallValue
from efapprox.errors import (InsufficientCoefficients, NoGrowthBound,
                             RecurrenceSingular)
from efapprox.series import (CoefficientTable, ESeries, HypergeometricSpec,
                             Recurrence, apery_a22, bessel_j0,
                             bessel_j0_prime, exp_series, kummer_1f1,
                             one_f_two_g)


def mpf_to_fraction(x) -> F:
    return F(*mpmath.libmp.to_rational(x._mpf_))


def test_exp_coefficients_all_one():
    assert exp_series().coefficients(10) == [F(1)] * 11


def test_j0_renormalized_coefficients():
    # expanding sum (iz/2)^{2n}/n!^2 gives a_{2n} = (-1)^n C(2n,n)/4^n; a_2 = -1/2
    a = bessel_j0().coefficients(6)
    assert a[1] == 0 and a[3] == 0 and a[5] == 0
    assert a[2] == F(-1, 2)
    for n in range(4):
        assert a[2 * n] == F((-1) ** n * math.comb(2 * n, n), 4 ** n)


def test_j0_prime_is_shift():
    a = bessel_j0().coefficients(9)
    b = bessel_j0_prime().coefficients(8)
    assert b == a[1:]


def apery_double_sum(n):
    return sum(math.comb(n, k) ** 2 * math.comb(n + k, n) ** 2
               for k in range(n + 1))


def test_apery_matches_double_sum_oracle():
    got = apery_a22().coefficients(8)
    assert got[:4] == [1, 5, 73, 1445]
    for n, v in enumerate(got):
        assert v == apery_double_sum(n)


def test_hypergeometric_two_paths_agree():
    specs = [
        HypergeometricSpec.make([], [], 1),
        HypergeometricSpec.make([1], [1, 1], F(-1, 4), 2),
        HypergeometricSpec.make([F(1, 2)], [F(1, 3), F(2, 3)], 1, 2),
        HypergeometricSpec.make([5], [F(7, 3)], 1),
        HypergeometricSpec.make([6], [F(-2, 5)], 1),
    ]
    for spec in specs:
        assert spec.term_coefficients(24) == spec.term_coefficients_product(24)


def test_lower_parameter_validation():
    with pytest.raises(ValueError):
        HypergeometricSpec.make([1], [-2], 1)
    # negative non-integers are fine
    HypergeometricSpec.make([1], [F(-2, 5)], 1)


def test_recurrence_singular_index():
    # leading coefficient n-3 vanishes at the step computing a_4 (n=3)
    rec = Recurrence.make([["1"], ["-3", "1"]], ["1"])
    s = ESeries(rec)
    with pytest.raises(RecurrenceSingular) as err:
        s.coefficients(8)
    assert err.value.index == 3


def test_truncated_table_raises_beyond_length():
    s = ESeries(CoefficientTable((F(1), F(2), F(3))))
    assert s.coefficients(2) == [1, 2, 3]
    with pytest.raises(InsufficientCoefficients):
        s.coefficients(3)


def test_polynomial_table_extends_with_zeros():
    s = ESeries(CoefficientTable((F(2), F(1)), polynomial=True))
    assert s.coefficients(4) == [2, 1, 0, 0, 0]


def test_eval_ball_exp_against_mpmath():
    ball = exp_series().eval_ball(1, 256)
    mpmath.mp.prec = 320
    assert ball.contains(mpf_to_fraction(mpmath.exp(1)))
    assert ball.rad < F(1, 2 ** 200)
    ball_neg = exp_series().eval_ball(F(-3, 2), 192)
    assert ball_neg.contains(mpf_to_fraction(mpmath.exp(mpmath.mpf(-1.5))))


def test_eval_ball_j0_against_mpmath():
    ball = bessel_j0().eval_ball(1, 256)
    mpmath.mp.prec = 320
    assert ball.contains(mpf_to_fraction(mpmath.besselj(0, 1)))


def test_exotic_rational_kummer_values():
    b1 = kummer_1f1(5, F(7, 3)).eval_ball(F(-2, 3), 256)
    assert b1.contains(F(5, 27))
    assert b1.excludes_zero()
    b2 = kummer_1f1(6, F(-2, 5)).eval_ball(F(-12, 5), 256)
    assert b2.contains(F(1309, 625))


@given(st.lists(st.fractions(min_value=-8, max_value=8, max_denominator=6),
                min_size=1, max_size=6),
       st.fractions(min_value=-3, max_value=3, max_denominator=8))
@settings(max_examples=120, deadline=None)
def test_polynomial_eval_ball_contains_horner_value(coeffs, point):
    s = ESeries(CoefficientTable(tuple(coeffs), polynomial=True))
    exact = sum(c * point ** n / math.factorial(n) for n, c in enumerate(coeffs))
    ball = s.eval_ball(point, 128)
    assert ball.contains(exact)


def test_growth_certificate_failure():
    # a_{n+1} = (n+1)^2 a_n gives a_n = (n!)^2, defeating any geometric bound
    rec = Recurrence.make([["-1", "-2", "-1"], ["1"]], ["1"])
    s = ESeries(rec)
    with pytest.raises(NoGrowthBound):
        s.eval_ball(1, 64)


def test_g_series_first_terms():
    # g = 1F2[1/2;1/3,2/3;z^2] = sum r_n z^{2n}, r_0 = 1, r_1 = (1/2)/((1/3)(2/3)) = 9/4... /1!
    g = one_f_two_g()
    a = g.coefficients(4)
    assert a[0] == 1
    assert a[2] == F(9, 4) * 2  # (2n)! r_n at n=1
