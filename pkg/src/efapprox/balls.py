"""Midpoint-radius ball arithmetic over dyadic rationals.

A :class:`BallValue` encloses an unknown real number in the interval
``[mid - rad, mid + rad]``.  Both midpoint and radius are stored as exact
``Fraction`` values whose denominators are powers of two, so every operation
can be carried out exactly and then *compressed*: the midpoint is rounded to
about ``precision_bits`` significant bits and the rounding error is folded
into the radius, which is itself rounded upward.  Containment of the true
value is therefore an invariant of every operation, with no reliance on
floating-point rounding modes or global precision state.

This is deliberately simple rather than fast: balls here certify values such
as ``f(1)`` for an entire series, or the smallness of ``|q f(1) - p|``, at a
few thousand bits at most.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import BallDomainError

_ZERO = Fraction(0)

RationalLike = Union[int, Fraction]

# Significant bits kept for radii.  Radii only need a little headroom: they
# are upper bounds, not measurements.
_RADIUS_BITS = 32


def _dyadic_nearest(x: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Round ``x`` to a dyadic rational with about ``bits`` significant bits.

    Returns ``(value, |x - value|)`` with the error exact.  Integers are kept
    as they are; only genuine fractions get rounded.
    """
    if x == 0:
        return _ZERO, _ZERO
    n, d = x.numerator, x.denominator
    if d == 1:
        return x, _ZERO
    k = bits - (n.bit_length() - d.bit_length())
    if k >= 0:
        # nearest m/2^k; ties round away from zero, deterministically
        num = n << (k + 1)
        m = (num + d) // (2 * d) if n > 0 else -((-num + d) // (2 * d))
        value = Fraction(m, 1 << k)
    else:
        den = d << (-k)
        m = (2 * n + den) // (2 * den) if n > 0 else -((-2 * n + den) // (2 * den))
        value = Fraction(m << (-k))
    return value, abs(x - value)


def _dyadic_up(x: Fraction, bits: int = _RADIUS_BITS) -> Fraction:
    """Smallest convenient dyadic rational >= ``x`` (``x`` >= 0)."""
    if x == 0:
        return _ZERO
    n, d = x.numerator, x.denominator
    if d == 1:
        return x
    k = bits - (n.bit_length() - d.bit_length())
    if k >= 0:
        m = -((-n << k) // d)
        return Fraction(m, 1 << k)
    den = d << (-k)
    m = -((-n) // den)
    return Fraction(m << (-k))


@dataclass(frozen=True)
class BallValue:
    """Certified enclosure ``[mid - rad, mid + rad]`` of a real number."""

    mid: Fraction
    rad: Fraction
    precision_bits: int

    def __post_init__(self):
        if self.rad < 0:
            raise ValueError("negative radius")
        if self.precision_bits <= 0:
            raise ValueError("precision_bits must be positive")

    # -- construction -------------------------------------------------

    @staticmethod
    def exact(value: RationalLike, precision_bits: int = 64) -> "BallValue":
        """Ball of radius zero around a rational value (kept exact)."""
        return BallValue(Fraction(value), _ZERO, precision_bits)

    @staticmethod
    def from_fraction(value: RationalLike, precision_bits: int) -> "BallValue":
        """Enclose a rational, rounding the midpoint to the working precision."""
        mid, err = _dyadic_nearest(Fraction(value), precision_bits)
        return BallValue(mid, _dyadic_up(err), precision_bits)

    @staticmethod
    def from_interval(lo: Fraction, hi: Fraction, precision_bits: int) -> "BallValue":
        if lo > hi:
            raise ValueError("empty interval")
        mid = (lo + hi) / 2
        rad = (hi - lo) / 2
        return BallValue(mid, rad, precision_bits).compress()

    # -- bookkeeping ---------------------------------------------------

    def compress(self, precision_bits: int | None = None) -> "BallValue":
        """Round midpoint to working precision, folding the error into the radius."""
        prec = precision_bits or self.precision_bits
        mid, err = _dyadic_nearest(self.mid, prec)
        rad = _dyadic_up(self.rad + err)
        return BallValue(mid, rad, prec)

    def lower(self) -> Fraction:
        return self.mid - self.rad

    def upper(self) -> Fraction:
        return self.mid + self.rad

    def _prec(self, other: "BallValue") -> int:
        return max(self.precision_bits, other.precision_bits)

    # -- arithmetic (outward-rounded via exact compute + compress) -----

    def __neg__(self) -> "BallValue":
        return BallValue(-self.mid, self.rad, self.precision_bits)

    def __add__(self, other) -> "BallValue":
        if isinstance(other, BallValue):
            return BallValue(self.mid + other.mid, self.rad + other.rad,
                             self._prec(other)).compress()
        if isinstance(other, (int, Fraction)):
            return BallValue(self.mid + other, self.rad, self.precision_bits).compress()
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other) -> "BallValue":
        if isinstance(other, BallValue):
            return self + (-other)
        if isinstance(other, (int, Fraction)):
            return BallValue(self.mid - other, self.rad, self.precision_bits).compress()
        return NotImplemented

    def __rsub__(self, other) -> "BallValue":
        return (-self) + other

    def __mul__(self, other) -> "BallValue":
        if isinstance(other, BallValue):
            mid = self.mid * other.mid
            rad = (abs(self.mid) * other.rad + abs(other.mid) * self.rad
                   + self.rad * other.rad)
            return BallValue(mid, rad, self._prec(other)).compress()
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return BallValue(self.mid * q, self.rad * abs(q),
                             self.precision_bits).compress()
        return NotImplemented

    __rmul__ = __mul__

    def reciprocal(self) -> "BallValue":
        if not self.excludes_zero():
            raise BallDomainError("reciprocal of a ball containing zero")
        lo, hi = self.lower(), self.upper()
        rlo, rhi = 1 / hi, 1 / lo
        if rlo > rhi:
            rlo, rhi = rhi, rlo
        return BallValue.from_interval(rlo, rhi, self.precision_bits)

    def __truediv__(self, other) -> "BallValue":
        if isinstance(other, BallValue):
            return self * other.reciprocal()
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError
            return self * (Fraction(1) / Fraction(other))
        return NotImplemented

    def __rtruediv__(self, other) -> "BallValue":
        if isinstance(other, (int, Fraction)):
            return self.reciprocal() * Fraction(other)
        return NotImplemented

    def __abs__(self) -> "BallValue":
        if self.excludes_zero():
            return BallValue(abs(self.mid), self.rad, self.precision_bits)
        hi = max(abs(self.lower()), abs(self.upper()))
        return BallValue.from_interval(_ZERO, hi, self.precision_bits)

    # -- predicates -----------------------------------------------------

    def contains(self, value: RationalLike) -> bool:
        return abs(Fraction(value) - self.mid) <= self.rad

    def contains_zero(self) -> bool:
        return self.contains(0)

    def excludes_zero(self) -> bool:
        return not self.contains_zero()

    def is_exact(self) -> bool:
        return self.rad == 0

    def floor_certified(self) -> int | None:
        """Certified floor of the enclosed value, or None if ambiguous."""
        lo = math.floor(self.lower())
        hi = math.floor(self.upper())
        return lo if lo == hi else None

    # -- reporting helpers (not rigor-bearing) ---------------------------

    def midpoint_float(self) -> float:
        return float(self.mid)

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return f"BallValue(~{float(self.mid):.6g} +/- {float(self.rad):.3g}, {self.precision_bits}b)"


def log2_fraction(x: Fraction) -> float:
    """Approximate log2 of a positive rational of arbitrary size."""
    if x <= 0:
        raise ValueError("log2 of nonpositive value")
    n, d = x.numerator, x.denominator
    en, ed = n.bit_length(), d.bit_length()
    # normalize both to ~53-bit mantissas so float conversion is safe
    n >>= max(0, en - 53)
    d >>= max(0, ed - 53)
    return math.log2(n) - math.log2(d) + max(0, en - 53) - max(0, ed - 53)
