"""Exact univariate Laurent polynomials, matrices of them, and rational functions.

Coefficients are ``Fraction``; values are immutable and eagerly normalized
(zero boundary coefficients trimmed on construction) so equality is
structural.  These are the carriers for differential systems with entries in
``Q[z, 1/z]`` and for the iterated polynomial vectors they generate.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import PoleAtZero

_F0 = Fraction(0)
_F1 = Fraction(1)


class LaurentPoly:
    """Sum of ``coeffs[i] * z**(low + i)`` with nonzero boundary coefficients."""

    __slots__ = ("low", "coeffs")

    def __init__(self, low: int, coeffs: Iterable[Fraction | int]):
        cs = [Fraction(c) for c in coeffs]
        lo = 0
        while cs and cs[0] == 0:
            cs.pop(0)
            lo += 1
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "low", (low + lo) if cs else 0)
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *a):  # immutable
        raise AttributeError("LaurentPoly is immutable")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero() -> "LaurentPoly":
        return LaurentPoly(0, ())

    @staticmethod
    def one() -> "LaurentPoly":
        return LaurentPoly(0, (1,))

    @staticmethod
    def constant(c: Fraction | int) -> "LaurentPoly":
        return LaurentPoly(0, (c,))

    @staticmethod
    def monomial(c: Fraction | int, exponent: int) -> "LaurentPoly":
        return LaurentPoly(exponent, (c,))

    @staticmethod
    def z() -> "LaurentPoly":
        return LaurentPoly(1, (1,))

    @staticmethod
    def from_dict(d: dict[int, Fraction | int]) -> "LaurentPoly":
        if not d:
            return LaurentPoly.zero()
        lo = min(d)
        hi = max(d)
        return LaurentPoly(lo, [d.get(e, 0) for e in range(lo, hi + 1)])

    # -- structure ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def high(self) -> int:
        """Largest exponent with nonzero coefficient (0 for the zero poly)."""
        return self.low + len(self.coeffs) - 1 if self.coeffs else 0

    def degree(self) -> int:
        """Degree as a Laurent polynomial; -1 for zero (poly convention)."""
        return self.high if self.coeffs else -1

    def order_at_zero(self) -> int | None:
        """Valuation at z=0, or None for the zero polynomial."""
        return self.low if self.coeffs else None

    def coefficient(self, exponent: int) -> Fraction:
        i = exponent - self.low
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return _F0

    def items(self):
        for i, c in enumerate(self.coeffs):
            if c != 0:
                yield self.low + i, c

    def is_polynomial(self) -> bool:
        return self.is_zero() or self.low >= 0

    def is_monomial(self) -> bool:
        return len(self.coeffs) == 1

    # -- arithmetic -----------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self.low == other.low and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self == LaurentPoly.constant(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.low, self.coeffs))

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.low, [-c for c in self.coeffs])

    def __add__(self, other) -> "LaurentPoly":
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.constant(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        lo = min(self.low, other.low)
        hi = max(self.high, other.high)
        out = [_F0] * (hi - lo + 1)
        for i, c in enumerate(self.coeffs):
            out[self.low - lo + i] = c
        for i, c in enumerate(other.coeffs):
            out[other.low - lo + i] += c
        return LaurentPoly(lo, out)

    __radd__ = __add__

    def __sub__(self, other) -> "LaurentPoly":
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.constant(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "LaurentPoly":
        return (-self) + other

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return LaurentPoly.zero()
            return LaurentPoly(self.low, [c * other for c in self.coeffs])
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return LaurentPoly.zero()
        out = [_F0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b != 0:
                    out[i + j] += a * b
        return LaurentPoly(self.low + other.low, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            raise ValueError("negative power")
        result = LaurentPoly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by z**k."""
        if self.is_zero():
            return self
        return LaurentPoly(self.low + k, self.coeffs)

    def differentiate(self) -> "LaurentPoly":
        """d/dz, mapping z^n to n z^(n-1)."""
        return LaurentPoly(self.low - 1,
                           [(self.low + i) * c for i, c in enumerate(self.coeffs)])

    def truncate(self, max_exponent: int) -> "LaurentPoly":
        """Drop all terms with exponent > max_exponent."""
        if self.is_zero() or self.high <= max_exponent:
            return self
        keep = max_exponent - self.low + 1
        if keep <= 0:
            return LaurentPoly.zero()
        return LaurentPoly(self.low, self.coeffs[:keep])

    def drop_below(self, min_exponent: int) -> "LaurentPoly":
        if self.is_zero() or self.low >= min_exponent:
            return self
        skip = min_exponent - self.low
        return LaurentPoly(min_exponent, self.coeffs[skip:])

    def evaluate_at(self, point: Fraction | int) -> Fraction:
        q = Fraction(point)
        if q == 0:
            if self.low < 0:
                raise PoleAtZero("evaluation at 0 with negative exponents")
            return self.coefficient(0)
        # Horner over the coefficient window, then scale by q**low
        acc = _F0
        for c in reversed(self.coeffs):
            acc = acc * q + c
        return acc * q ** self.low

    def map_coeffs(self, fn: Callable[[Fraction], Fraction]) -> "LaurentPoly":
        return LaurentPoly(self.low, [fn(c) for c in self.coeffs])

    def denominator_lcm(self) -> int:
        out = 1
        for c in self.coeffs:
            out = out * c.denominator // math.gcd(out, c.denominator)
        return out

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        if self.is_zero():
            return "0"
        parts = []
        for e, c in self.items():
            if e == 0:
                parts.append(f"{c}")
            elif e == 1:
                parts.append(f"{c}*z")
            else:
                parts.append(f"{c}*z^{e}")
        return " + ".join(parts)


def taylor_shift_one(p: LaurentPoly) -> LaurentPoly:
    """Expand a polynomial p(z) around z=1: coefficients of p(1+u) in u.

    Requires p to be a true polynomial (no negative exponents).
    """
    if not p.is_polynomial():
        raise ValueError("taylor_shift_one needs a polynomial")
    deg = p.degree()
    if deg < 0:
        return LaurentPoly.zero()
    out = [_F0] * (deg + 1)
    for nu, c in p.items():
        b = 1
        for i in range(nu + 1):
            out[i] += c * b
            b = b * (nu - i) // (i + 1)
    return LaurentPoly(0, out)


def poly_gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Monic gcd of the polynomial parts, ignoring powers of z.

    Laurent units z^k are factored out first, so the result is a monic
    ordinary polynomial with nonzero constant term (or z^0 = 1).
    """
    if a.is_zero():
        return _monic(b.shift(-b.low)) if not b.is_zero() else LaurentPoly.zero()
    if b.is_zero():
        return _monic(a.shift(-a.low))
    x = a.shift(-a.low)
    y = b.shift(-b.low)
    while not y.is_zero():
        x, y = y, _poly_mod(x, y)
    return _monic(x)


def _monic(p: LaurentPoly) -> LaurentPoly:
    if p.is_zero():
        return p
    lead = p.coeffs[-1]
    return p * (_F1 / lead)


def _poly_mod(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    # remainder of polynomial division (both with low >= 0)
    r = a
    db = b.degree()
    lead_b = b.coeffs[-1]
    while not r.is_zero() and r.degree() >= db:
        k = r.degree() - db
        factor = r.coeffs[-1] / lead_b
        r = r - b.shift(k) * factor
    return r


class RatFunc:
    """Rational function num/den of Laurent polynomials, gcd-reduced."""

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: LaurentPoly, reduce: bool = True):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            num, den = LaurentPoly.zero(), LaurentPoly.one()
        elif reduce:
            g = poly_gcd(num, den)
            if g.degree() > 0:
                num = _poly_exact_div(num, g)
                den = _poly_exact_div(den, g)
            # normalize: den a polynomial with nonzero constant term, monic
            shift = den.low
            num = num.shift(-shift)
            den = den.shift(-shift)
            lead = den.coeffs[-1]
            if lead != 1:
                inv = _F1 / lead
                num = num * inv
                den = den * inv
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):
        raise AttributeError("RatFunc is immutable")

    @staticmethod
    def from_laurent(p: LaurentPoly) -> "RatFunc":
        return RatFunc(p, LaurentPoly.one(), reduce=False)

    @staticmethod
    def constant(c: Fraction | int) -> "RatFunc":
        return RatFunc.from_laurent(LaurentPoly.constant(c))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_laurent(self) -> bool:
        return self.den == LaurentPoly.one()

    def as_laurent(self) -> LaurentPoly:
        if not self.is_laurent():
            raise ValueError("not a Laurent polynomial")
        return self.num

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, LaurentPoly)):
            other = RatFunc.from_laurent(
                other if isinstance(other, LaurentPoly) else LaurentPoly.constant(other))
        if not isinstance(other, RatFunc):
            return NotImplemented
        return (self.num * other.den) == (other.num * self.den)

    def __hash__(self):
        return hash((self.num, self.den))

    def _coerce(self, other) -> "RatFunc | None":
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, LaurentPoly):
            return RatFunc.from_laurent(other)
        if isinstance(other, (int, Fraction)):
            return RatFunc.constant(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError
        return RatFunc(self.num * o.den, self.den * o.num)

    def differentiate(self) -> "RatFunc":
        return RatFunc(self.num.differentiate() * self.den
                       - self.num * self.den.differentiate(),
                       self.den * self.den)

    def evaluate_at(self, point: Fraction | int) -> Fraction:
        d = self.den.evaluate_at(point)
        if d == 0:
            raise ZeroDivisionError("pole at evaluation point")
        return self.num.evaluate_at(point) / d

    def series(self, max_exponent: int) -> LaurentPoly:
        """Laurent series expansion at z=0, truncated after z^max_exponent."""
        if self.is_zero():
            return LaurentPoly.zero()
        num, den = self.num, self.den
        v = den.low
        unit = den.shift(-v)  # nonzero constant term
        c0 = unit.coeffs[0]
        # invert the unit power series to the needed order
        order = max_exponent - num.low + v
        if order < 0:
            return LaurentPoly.zero()
        inv = [_F1 / c0]
        for n in range(1, order + 1):
            s = _F0
            for k in range(1, min(n, unit.degree()) + 1):
                s += unit.coefficient(k) * inv[n - k]
            inv.append(-s / c0)
        inv_poly = LaurentPoly(-v, inv)
        return (num * inv_poly).truncate(max_exponent)

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        if self.is_laurent():
            return repr(self.num)
        return f"({self.num!r})/({self.den!r})"


def _poly_exact_div(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Exact division a/b where b | a as Laurent polynomials."""
    if a.is_zero():
        return a
    low = a.low - b.low
    x = a.shift(-a.low)
    y = b.shift(-b.low)
    out: dict[int, Fraction] = {}
    lead_b = y.coeffs[-1]
    db = y.degree()
    while not x.is_zero():
        k = x.degree() - db
        if k < 0:
            raise ArithmeticError("inexact polynomial division")
        c = x.coeffs[-1] / lead_b
        out[k] = c
        x = x - y.shift(k) * c
    return LaurentPoly.from_dict(out).shift(low)


class LaurentMatrix:
    """Dense rows x cols matrix of LaurentPoly entries (row-major)."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Sequence[LaurentPoly]):
        if len(entries) != rows * cols:
            raise ValueError("entry count mismatch")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", tuple(entries))

    def __setattr__(self, *a):
        raise AttributeError("LaurentMatrix is immutable")

    @staticmethod
    def zeros(rows: int, cols: int) -> "LaurentMatrix":
        z = LaurentPoly.zero()
        return LaurentMatrix(rows, cols, (z,) * (rows * cols))

    @staticmethod
    def from_rows(rows_of_entries: Sequence[Sequence[LaurentPoly]]) -> "LaurentMatrix":
        r = len(rows_of_entries)
        c = len(rows_of_entries[0]) if r else 0
        flat = []
        for row in rows_of_entries:
            if len(row) != c:
                raise ValueError("ragged rows")
            flat.extend(row)
        return LaurentMatrix(r, c, flat)

    def entry(self, i: int, j: int) -> LaurentPoly:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[LaurentPoly, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def transpose(self) -> "LaurentMatrix":
        return LaurentMatrix(self.cols, self.rows,
                             [self.entry(i, j) for j in range(self.cols)
                              for i in range(self.rows)])

    def apply_to_vector(self, vec: Sequence[LaurentPoly]) -> list[LaurentPoly]:
        if len(vec) != self.cols:
            raise ValueError("dimension mismatch")
        out = []
        for i in range(self.rows):
            acc = LaurentPoly.zero()
            for j, v in enumerate(vec):
                e = self.entry(i, j)
                if not e.is_zero() and not v.is_zero():
                    acc = acc + e * v
            out.append(acc)
        return out

    def evaluate_at(self, point: Fraction | int) -> list[list[Fraction]]:
        return [[self.entry(i, j).evaluate_at(point) for j in range(self.cols)]
                for i in range(self.rows)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        lines = []
        for i in range(self.rows):
            lines.append("[" + ", ".join(repr(e) for e in self.row(i)) + "]")
        return "LaurentMatrix(\n  " + "\n  ".join(lines) + "\n)"
