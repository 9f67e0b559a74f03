"""First-order systems, scalar differential operators, and residual checks.

The system shape is ``f_l' = S_{l,0} + sum_j S_{l,j} f_j`` with all entries
Laurent polynomials over Q, i.e. zero is the only finite singularity.  The
scalar side carries operators ``L = sum q_j (d/dz)^j`` with rational-function
coefficients, their adjoints, and the order-reduction that turns ``L y = 0``
into an inhomogeneous equation of order r-1 when the adjoint has a Laurent
polynomial in its kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import NotDesingularized
from .laurent import LaurentMatrix, LaurentPoly, RatFunc
from .linalg import ExactMatrix, kernel_vectors
from .series import ESeries

_F0 = Fraction(0)


@dataclass(frozen=True)
class DiffSystem:
    """m x (m+1) Laurent matrix S storing S_{l,0..m}; row l encodes f_l'."""

    m: int
    S: LaurentMatrix
    labels: tuple[str, ...]

    def __post_init__(self):
        if self.S.rows != self.m or self.S.cols != self.m + 1:
            raise ValueError("S must be m x (m+1)")
        if len(self.labels) != self.m:
            raise ValueError("need one label per function")

    @staticmethod
    def make(entries: Sequence[Sequence[LaurentPoly]], labels: Sequence[str] | None = None
             ) -> "DiffSystem":
        m = len(entries)
        labels = tuple(labels) if labels else tuple(f"f{i+1}" for i in range(m))
        return DiffSystem(m, LaurentMatrix.from_rows(entries), labels)

    @staticmethod
    def from_rational_entries(entries: Sequence[Sequence[RatFunc]],
                              labels: Sequence[str] | None = None) -> "DiffSystem":
        """Build from rational functions, requiring them to be Laurent.

        A denominator with a root away from 0 means the system has a finite
        nonzero singularity, which the construction cannot accept.
        """
        rows = []
        for row in entries:
            out = []
            for rf in row:
                if not rf.den.is_monomial():
                    raise NotDesingularized(
                        f"entry {rf!r} is not a Laurent polynomial")
                out.append(rf.num.shift(-rf.den.low) * (1 / rf.den.coeffs[0]))
            rows.append(out)
        return DiffSystem.make(rows, labels)

    def entry(self, l: int, j: int) -> LaurentPoly:
        """S_{l,j} with l in 1..m and j in 0..m (paper indexing)."""
        return self.S.entry(l - 1, j)


def system_residual(sys: DiffSystem, series: Sequence[ESeries],
                    order_checked: int) -> LaurentPoly:
    """Max-degree-truncated residual of f_l' - S_{l,0} - sum S_{l,j} f_j.

    Returns the sum of absolute residual polynomials over all rows; zero iff
    every equation holds to the checked order.
    """
    if len(series) != sys.m:
        raise ValueError("series count mismatch")
    depth = order_checked + max(0, -min((e.low for e in sys.S.entries
                                         if not e.is_zero()), default=0)) + 2
    polys = [f.taylor_polynomial(depth) for f in series]
    total = LaurentPoly.zero()
    for l in range(1, sys.m + 1):
        acc = polys[l - 1].differentiate() - sys.entry(l, 0)
        for j in range(1, sys.m + 1):
            acc = acc - sys.entry(l, j) * polys[j - 1]
        acc = acc.truncate(order_checked)
        total = total + acc.map_coeffs(abs)
    return total.truncate(order_checked)


@dataclass(frozen=True)
class DiffOperator:
    """L = sum_{j<=r} coeffs[j] (d/dz)^j with rational-function coefficients."""

    coeffs: tuple[RatFunc, ...]

    def __post_init__(self):
        if not self.coeffs or self.coeffs[-1].is_zero():
            raise ValueError("leading coefficient must be nonzero")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @staticmethod
    def from_laurent(coeffs: Sequence[LaurentPoly]) -> "DiffOperator":
        return DiffOperator(tuple(RatFunc.from_laurent(c) for c in coeffs))

    def laurent_coefficients(self) -> list[LaurentPoly]:
        """Coefficients after clearing the common denominator and any z-shift.

        The returned operator z^s * D * L has polynomial coefficients and the
        same kernel as L, which is all residual checking needs.
        """
        den = LaurentPoly.one()
        for q in self.coeffs:
            den = _laurent_lcm(den, q.den)
        cleared = []
        for q in self.coeffs:
            num = q.num * _laurent_exact(den, q.den)
            cleared.append(num)
        shift = -min((c.low for c in cleared if not c.is_zero()), default=0)
        if shift > 0:
            cleared = [c.shift(shift) for c in cleared]
        return cleared

    def adjoint(self) -> "DiffOperator":
        """L* y = sum (-1)^j (q_j y)^(j), expanded to standard form.

        Leibniz gives the standard-form coefficients
        q~_i = sum_{j>=i} (-1)^j C(j,i) q_j^(j-i).
        """
        r = self.order
        out = []
        for i in range(r + 1):
            acc = RatFunc.constant(0)
            for j in range(i, r + 1):
                term = self.coeffs[j]
                for _ in range(j - i):
                    term = term.differentiate()
                acc = acc + term * ((-1) ** j * math.comb(j, i))
            out.append(acc)
        while len(out) > 1 and out[-1].is_zero():
            out.pop()
        return DiffOperator(tuple(out))

    def apply_series(self, f: ESeries, order_checked: int) -> LaurentPoly:
        """Truncated series of (z^s D L)(f); see laurent_coefficients."""
        cleared = self.laurent_coefficients()
        max_deriv = self.order
        span = max((c.high for c in cleared if not c.is_zero()), default=0)
        poly = f.taylor_polynomial(order_checked + max_deriv + span + 2)
        acc = LaurentPoly.zero()
        d = poly
        for j, c in enumerate(cleared):
            if j > 0:
                d = d.differentiate()
            if not c.is_zero():
                acc = acc + c * d
        return acc.truncate(order_checked)


def _laurent_lcm(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    from .laurent import poly_gcd, _poly_exact_div
    if a.is_zero() or b.is_zero():
        return LaurentPoly.zero()
    g = poly_gcd(a, b)
    return a * _poly_exact_div(b, g)


def _laurent_exact(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    from .laurent import _poly_exact_div
    return _poly_exact_div(a, b)


def ode_residual(f: ESeries, op: DiffOperator, order_checked: int) -> list[Fraction]:
    """Coefficients of z^0..z^order_checked of L(f), cleared of denominators.

    All zero iff f satisfies L f = 0 to the checked order.
    """
    if order_checked < op.order:
        raise ValueError("order_checked must be at least the operator order")
    res = op.apply_series(f, order_checked)
    return [res.coefficient(k) for k in range(order_checked + 1)]


def algebraic_relation_check(g: ESeries, order_checked: int) -> bool:
    """Check g^2 - g'^2/4 + 9 z^2 (4g - g'')^2 / 4 = 1 to the given order."""
    depth = order_checked + 4
    p = g.taylor_polynomial(depth)
    dp = p.differentiate()
    ddp = dp.differentiate()
    z2 = LaurentPoly(2, [1])
    combo = (p * p - dp * dp * Fraction(1, 4)
             + z2 * (p * 4 - ddp) * (p * 4 - ddp) * Fraction(9, 4)
             - LaurentPoly.one())
    return combo.truncate(order_checked).is_zero()


@dataclass(frozen=True)
class ReductionResult:
    """Order r-1 inhomogeneous form of an order-r operator.

    ``multiplier`` is the Laurent solution R of L* R = 0 and ``p`` the
    coefficients with d/dz (sum p_j (d/dz)^j) = R L.  For any solution f of
    L f = 0 the combination sum p_j f^(j) is a constant; its value depends on
    the particular solution and is computed by :meth:`constant_for`.
    """

    p: tuple[RatFunc, ...]
    multiplier: LaurentPoly

    def constant_for(self, f: ESeries, order_checked: int = 24) -> Fraction:
        """The constant value of sum p_j f^(j) for a specific solution f.

        Computed as the constant term of the Laurent expansion; the other
        coefficients are asserted to vanish to the checked order.
        """
        shift = 0
        acc = LaurentPoly.zero()
        depth = order_checked + len(self.p) + 8
        for rf in self.p:
            shift = max(shift, rf.den.degree() + abs(rf.num.low) + 2)
        poly = f.taylor_polynomial(depth + shift)
        d = poly
        for j, rf in enumerate(self.p):
            if j > 0:
                d = d.differentiate()
            if not rf.is_zero():
                acc = acc + rf.series(order_checked) * d
        acc = acc.truncate(order_checked)
        const = acc.coefficient(0)
        rest = acc - LaurentPoly.constant(const)
        if not rest.truncate(order_checked).is_zero():
            raise ArithmeticError("combination is not constant; f does not solve L f = 0")
        return const


def inhomogeneous_reduction(op: DiffOperator,
                            degree_window: tuple[int, int]) -> ReductionResult | None:
    """Search for a Laurent R with L* R = 0 and integrate R L by parts.

    The window bounds the Laurent exponents of R.  Returns None when no
    nonzero Laurent solution exists in the window (a legitimate outcome).
    Solving descends from p_{r-1} = R q_r via p_{j-1} = R q_j - p_j'; the
    closing identity p_0' = R q_0 is equivalent to L* R = 0 and is asserted.
    """
    low, high = degree_window
    if low > high:
        raise ValueError("empty degree window")
    adj = op.adjoint()
    cleared = adj.laurent_coefficients()
    # L*R as a linear map on the window coefficients
    cols = []
    exps: set[int] = set()
    for i in range(low, high + 1):
        image = LaurentPoly.zero()
        mono = LaurentPoly.monomial(1, i)
        d = mono
        for j, c in enumerate(cleared):
            if j > 0:
                d = d.differentiate()
            if not c.is_zero():
                image = image + c * d
        cols.append(image)
        for e, _ in image.items():
            exps.add(e)
    if not exps:
        # L* annihilates every monomial in the window (cannot happen for
        # a nonzero operator, but keep the degenerate case total)
        r_poly = LaurentPoly.monomial(1, low)
    else:
        rows_e = sorted(exps)
        mat = ExactMatrix.from_rows(
            [[col.coefficient(e) for col in cols] for e in rows_e])
        kernel = kernel_vectors(mat)
        if not kernel:
            return None
        coeffs = kernel[0]
        r_poly = LaurentPoly(low, coeffs)
        if r_poly.is_zero():
            return None
    r_rf = RatFunc.from_laurent(r_poly)
    r = op.order
    p: list[RatFunc] = [RatFunc.constant(0)] * r
    p[r - 1] = r_rf * op.coeffs[r]
    for j in range(r - 1, 0, -1):
        p[j - 1] = r_rf * op.coeffs[j] - p[j].differentiate()
    closing = p[0].differentiate() - r_rf * op.coeffs[0]
    if not closing.is_zero():
        raise AssertionError("adjoint kernel did not close the reduction")
    return ReductionResult(tuple(p), r_poly)
