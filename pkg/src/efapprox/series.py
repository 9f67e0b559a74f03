"""E-function series with exact rational coefficients.

A series is stored in the factorial normalization ``f(z) = sum a_n z^n / n!``
with ``a_n`` rational, produced by one of three rules: generalized
hypergeometric parameters, a linear recurrence with polynomial-in-n
coefficients, or an explicit coefficient table.  A cache of computed ``a_n``
grows append-only.

Rigorous evaluation at a rational point uses the geometric growth certificate
``|a_n| <= C^(n+1)``: the tail beyond the truncation order is dominated by
``sum (C|x|)^n / n!``, which is folded into the radius of the returned ball.
The constant ``C`` is taken from a user hint or measured on the cached prefix
and doubled; the bound is re-verified on every coefficient the evaluation
actually uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .balls import BallValue, _dyadic_up
from .errors import (InsufficientCoefficients, NoGrowthBound,
                     RecurrenceSingular)

_F0 = Fraction(0)
_F1 = Fraction(1)


def _is_nonpositive_integer(x: Fraction) -> bool:
    return x.denominator == 1 and x <= 0


@dataclass(frozen=True)
class HypergeometricSpec:
    """Parameters of pFq[a_1..a_p; b_1..b_q; c z^e].

    The coefficient of z^(e*n) is ``(a_1)_n...(a_p)_n / ((1)_n (b_1)_n...(b_q)_n) c^n``.
    With e = q - p + 1 and rational data this is an E-function (even powers of
    z absorb any i^2 = -1 into the scale, so J0 fits with c = -1/4, e = 2).
    """

    upper: tuple[Fraction, ...]
    lower: tuple[Fraction, ...]
    argument_scale: Fraction
    argument_power: int = 1

    def __post_init__(self):
        if len(self.upper) > len(self.lower) + 1:
            raise ValueError("need p <= q + 1; E-function regime is p <= q")
        if self.argument_power < 1:
            raise ValueError("argument_power must be a positive integer")
        for b in self.lower:
            if _is_nonpositive_integer(b):
                raise ValueError(f"lower parameter {b} is a nonpositive integer")

    @staticmethod
    def make(upper: Sequence, lower: Sequence, scale, power: int = 1
             ) -> "HypergeometricSpec":
        return HypergeometricSpec(tuple(Fraction(a) for a in upper),
                                  tuple(Fraction(b) for b in lower),
                                  Fraction(scale), power)

    def term_coefficients(self, n_max: int) -> list[Fraction]:
        """r_n c^n for n <= n_max, via the term ratio recurrence."""
        out = [_F1]
        t = _F1
        for n in range(n_max):
            num = self.argument_scale
            for a in self.upper:
                num *= a + n
            den = Fraction(n + 1)
            for b in self.lower:
                den *= b + n
            t = t * num / den
            out.append(t)
        return out

    def term_coefficients_product(self, n_max: int) -> list[Fraction]:
        """Same values by the closed product formula; independent code path."""
        out = []
        for n in range(n_max + 1):
            num = self.argument_scale ** n
            for a in self.upper:
                p = _F1
                for k in range(n):
                    p *= a + k
                num *= p
            den = Fraction(math.factorial(n))
            for b in self.lower:
                p = _F1
                for k in range(n):
                    p *= b + k
                den *= p
            out.append(num / den)
        return out


@dataclass(frozen=True)
class Recurrence:
    """sum_i coeffs[i](n) a_{n+i} = 0, with polynomial-in-n coefficients.

    ``coeffs[i]`` is the coefficient list (ascending powers of n) of a
    polynomial; the last one is the leading coefficient and must not vanish
    at any index used.
    """

    coeffs: tuple[tuple[Fraction, ...], ...]
    initial: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coeffs) < 2:
            raise ValueError("recurrence needs order >= 1")
        if len(self.initial) != len(self.coeffs) - 1:
            raise ValueError("initial value count must equal the order")

    @staticmethod
    def make(coeffs: Sequence[Sequence], initial: Sequence) -> "Recurrence":
        return Recurrence(tuple(tuple(Fraction(c) for c in poly) for poly in coeffs),
                          tuple(Fraction(v) for v in initial))

    def _poly_at(self, i: int, n: int) -> Fraction:
        acc = _F0
        for c in reversed(self.coeffs[i]):
            acc = acc * n + c
        return acc

    def extend(self, cache: list[Fraction], n_max: int) -> None:
        order = len(self.coeffs) - 1
        while len(cache) <= n_max:
            n = len(cache) - order  # recurrence evaluated at this shift
            lead = self._poly_at(order, n)
            if lead == 0:
                raise RecurrenceSingular(n)
            s = _F0
            for i in range(order):
                s += self._poly_at(i, n) * cache[n + i]
            cache.append(-s / lead)


@dataclass(frozen=True)
class CoefficientTable:
    """Explicit a_n values.  ``polynomial=True`` means zeros beyond the table
    (an exact polynomial); otherwise the table is a truncation and indices
    beyond it raise InsufficientCoefficients."""

    values: tuple[Fraction, ...]
    polynomial: bool = False


class ESeries:
    """Truncatable exact series sum a_n z^n / n! with an E-function growth hint."""

    def __init__(self, rule, growth_constant_hint: Optional[Fraction] = None,
                 name: str = ""):
        self.rule = rule
        self.growth_constant_hint = growth_constant_hint
        self.name = name
        self._cache: list[Fraction] = []
        if isinstance(rule, Recurrence):
            self._cache.extend(rule.initial)
        elif isinstance(rule, CoefficientTable):
            self._cache.extend(rule.values)

    # -- coefficient access ----------------------------------------------

    def coefficients(self, n_max: int) -> list[Fraction]:
        """Exact a_0..a_{n_max} in the z^n/n! normalization."""
        if n_max < 0:
            raise ValueError("n_max must be >= 0")
        self._ensure(n_max)
        return self._cache[:n_max + 1]

    def coefficient(self, n: int) -> Fraction:
        self._ensure(n)
        return self._cache[n]

    def _ensure(self, n_max: int) -> None:
        if len(self._cache) > n_max:
            return
        rule = self.rule
        if isinstance(rule, HypergeometricSpec):
            e = rule.argument_power
            terms = rule.term_coefficients(n_max // e)
            cache = []
            for k in range(n_max + 1):
                if k % e == 0:
                    cache.append(terms[k // e] * math.factorial(k))
                else:
                    cache.append(_F0)
            self._cache = cache
        elif isinstance(rule, Recurrence):
            rule.extend(self._cache, n_max)
        elif isinstance(rule, CoefficientTable):
            if rule.polynomial:
                self._cache.extend([_F0] * (n_max + 1 - len(self._cache)))
            else:
                raise InsufficientCoefficients(
                    f"table has {len(rule.values)} terms, need {n_max + 1}")
        else:
            raise TypeError(f"unknown coefficient rule {type(rule)!r}")

    def derivative(self) -> "ESeries":
        """Series of f'; in this normalization a'_n = a_{n+1}."""
        return _ShiftedSeries(self, 1)

    def taylor_polynomial(self, order: int):
        """Truncated ordinary power series sum a_n z^n / n!, as a LaurentPoly."""
        from .laurent import LaurentPoly
        cs = self.coefficients(order)
        return LaurentPoly(0, [c / math.factorial(n) for n, c in enumerate(cs)])

    # -- growth and evaluation ---------------------------------------------

    def growth_constant(self, scan: int = 32) -> int:
        """Integer C with |a_n| <= C^(n+1) on the cached prefix, doubled.

        Existence for a genuine E-function is part of its definition; the
        value is not.  The measured constant is re-checked against every
        coefficient an evaluation actually uses.
        """
        try:
            self._ensure(max(scan, len(self._cache) - 1))
        except InsufficientCoefficients:
            if not self._cache:
                raise NoGrowthBound("no coefficients available") from None
        c = 1
        if self.growth_constant_hint is not None:
            c = max(1, math.ceil(self.growth_constant_hint))
        guard = 0
        while not self._growth_ok(c):
            c *= 2
            guard += 1
            if guard > 512:
                raise NoGrowthBound("coefficients grow faster than geometrically")
        return 2 * c

    def _growth_ok(self, c: int) -> bool:
        for n, a in enumerate(self._cache):
            num, den = abs(a.numerator), a.denominator
            if num > den * c ** (n + 1):
                return False
        return True

    def eval_ball(self, point: Fraction | int, precision_bits: int) -> BallValue:
        """Ball certified to contain f(point)."""
        x = Fraction(point)
        c = self.growth_constant()
        cx = c * abs(x)
        # choose N with (C|x|)^(N+1)/(N+1)! below the target and the tail ratio <= 1/2
        target_log2 = precision_bits + 8
        n_trunc = max(8, 2 * math.ceil(cx))
        while _log2_tail(cx, n_trunc) > -target_log2:
            n_trunc *= 2
        self._ensure(n_trunc)
        if not self._growth_ok(c):
            raise NoGrowthBound("growth certificate failed on used prefix")
        acc = _F0
        xp = _F1
        fact = 1
        for n in range(n_trunc + 1):
            a = self._cache[n]
            if a != 0:
                acc += a * xp / fact
            xp *= x
            fact *= n + 1
        tail = _tail_bound(cx, n_trunc)
        ball = BallValue(acc, tail, precision_bits)
        return ball.compress()

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        label = self.name or type(self.rule).__name__
        return f"ESeries({label})"


class _ShiftedSeries(ESeries):
    """View of the k-th derivative of a base series."""

    def __init__(self, base: ESeries, shift: int):
        self.base = base
        self.shift = shift
        self.rule = base.rule
        self.growth_constant_hint = base.growth_constant_hint
        self.name = f"{base.name}'" if base.name else ""
        self._cache = []

    def _ensure(self, n_max: int) -> None:
        base_cache = self.base.coefficients(n_max + self.shift)
        self._cache = base_cache[self.shift:]

    def derivative(self) -> "ESeries":
        return _ShiftedSeries(self.base, self.shift + 1)


def _tail_bound(cx: Fraction, n: int) -> Fraction:
    """Rigorous bound for sum_{k>n} cx^k/k!, assuming cx <= (n+2)/2."""
    if cx == 0:
        return _F0
    first = cx ** (n + 1) / math.factorial(n + 1)
    # ratio of consecutive terms is cx/(n+2) <= 1/2, so the sum <= 2*first
    if 2 * cx > n + 2:
        raise ValueError("truncation order too small for the tail bound")
    return _dyadic_up(2 * first)


def _log2_tail(cx: Fraction, n: int) -> float:
    if cx == 0:
        return -10 ** 9
    if 2 * cx > n + 2:
        return 10 ** 9
    from .balls import log2_fraction
    t = cx ** (n + 1) / Fraction(math.factorial(n + 1))
    return log2_fraction(t) + 1 if t > 0 else -10 ** 9


# ---------------------------------------------------------------------------
# Constructors for the bundled functions
# ---------------------------------------------------------------------------

def exp_series() -> ESeries:
    """exp(z): all a_n = 1."""
    return ESeries(HypergeometricSpec.make([], [], 1), Fraction(1), name="exp")


def bessel_j0() -> ESeries:
    """J0(z) = sum ((iz/2)^2)^n / n!^2 = 1F2[1; 1,1; -z^2/4]."""
    return ESeries(HypergeometricSpec.make([1], [1, 1], Fraction(-1, 4), power=2),
                   Fraction(1), name="J0")


def bessel_j0_prime() -> ESeries:
    return bessel_j0().derivative()


def one_f_two_g() -> ESeries:
    """g(z) = 1F2[1/2; 1/3, 2/3; z^2]."""
    return ESeries(HypergeometricSpec.make([Fraction(1, 2)],
                                           [Fraction(1, 3), Fraction(2, 3)],
                                           1, power=2),
                   Fraction(4), name="g_1F2")


def apery_a22() -> ESeries:
    """Generating E-function of the Apery numbers 1, 5, 73, 1445, ...

    Constructed from the standard three-term recurrence
    (n+1)^3 u_{n+1} = (2n+1)(17n^2+17n+5) u_n - n^3 u_{n-1}; the double
    binomial sum is kept as an independent oracle in the tests.
    """
    # shifted to index base: c0(n) a_n + c1(n) a_{n+1} + c2(n) a_{n+2} = 0 at n>=0
    # with a_{n+2}: lead (n+2)^3; middle -(2n+3)(17(n+1)^2+17(n+1)+5); low (n+1)^3
    c_low = (_F1, Fraction(3), Fraction(3), _F1)                     # (n+1)^3
    # -(2n+3)(17n^2+51n+39) = -(34n^3 + 153n^2 + 231n + 117)... expanded below
    c_mid = tuple(Fraction(v) for v in (-117, -231, -153, -34))
    c_lead = tuple(Fraction(v) for v in (8, 12, 6, 1))               # (n+2)^3
    rec = Recurrence((c_low, c_mid, c_lead), (_F1, Fraction(5)))
    return ESeries(rec, Fraction(40), name="apery_A22")


def kummer_1f1(a, b) -> ESeries:
    """1F1[a; b; z]."""
    return ESeries(HypergeometricSpec.make([a], [b], 1), None,
                   name=f"1F1[{a};{b}]")
