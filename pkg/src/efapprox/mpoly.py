"""Multivariate polynomials over Q with packed exponent keys.

These back the linear algebra over the rational function field
``Q(x_1, ..., x_m)`` used when the approximating frame carries indeterminate
coordinates.  Monomials are packed into a single integer key (16 bits per
variable), so monomial multiplication is integer addition and term dicts stay
fast.  The natural integer order on packed keys is an admissible monomial
order (adding a key preserves comparisons), which is all that exact division
in fraction-free elimination needs.

Coefficients may be ``int`` or ``Fraction``; integer inputs stay integers,
which keeps Bareiss elimination on integer matrices free of gcd overhead.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

_SHIFT = 16
_MASK = (1 << _SHIFT) - 1


def pack(exponents: Sequence[int]) -> int:
    key = 0
    for i, e in enumerate(exponents):
        if e < 0 or e > _MASK:
            raise ValueError("exponent out of range")
        key |= e << (i * _SHIFT)
    return key


def unpack(key: int, nvars: int) -> tuple[int, ...]:
    return tuple((key >> (i * _SHIFT)) & _MASK for i in range(nvars))


class MPoly:
    """Polynomial in ``nvars`` variables; ``terms`` maps packed key -> coefficient."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict[int, Fraction | int] | None = None):
        self.nvars = nvars
        self.terms = {k: c for k, c in (terms or {}).items() if c != 0}

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero(nvars: int) -> "MPoly":
        return MPoly(nvars)

    @staticmethod
    def const(c: Fraction | int, nvars: int) -> "MPoly":
        return MPoly(nvars, {0: c} if c != 0 else {})

    @staticmethod
    def gen(i: int, nvars: int) -> "MPoly":
        if not 0 <= i < nvars:
            raise ValueError("generator index out of range")
        return MPoly(nvars, {1 << (i * _SHIFT): 1})

    # -- structure ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_value(self) -> Fraction:
        return Fraction(self.terms.get(0, 0))

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(unpack(k, self.nvars)) for k in self.terms)

    def leading(self) -> tuple[int, Fraction | int]:
        """Leading term under the packed-key order."""
        k = max(self.terms)
        return k, self.terms[k]

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = MPoly.const(other, self.nvars)
        if not isinstance(other, MPoly):
            return NotImplemented
        if self.nvars != other.nvars:
            return False
        if len(self.terms) != len(other.terms):
            return False
        for k, c in self.terms.items():
            if other.terms.get(k) != c:
                return False
        return True

    __hash__ = None  # mutable dict inside; treat as unhashable

    # -- arithmetic -----------------------------------------------------

    def _coerce(self, other) -> "MPoly | None":
        if isinstance(other, MPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return MPoly.const(other, self.nvars)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for k, c in o.terms.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return MPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.nvars, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return MPoly.zero(self.nvars)
            return MPoly(self.nvars, {k: c * other for k, c in self.terms.items()})
        if not isinstance(other, MPoly):
            return NotImplemented
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out: dict[int, Fraction | int] = {}
        get = out.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                s = get(k, 0) + ca * cb
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
        return MPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MPoly":
        if n < 0:
            raise ValueError("negative power")
        result = MPoly.const(1, self.nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def evaluate(self, point: Sequence[Fraction | int]) -> Fraction:
        if len(point) != self.nvars:
            raise ValueError("point dimension mismatch")
        total = Fraction(0)
        for k, c in self.terms.items():
            v = Fraction(c)
            for i, p in enumerate(point):
                e = (k >> (i * _SHIFT)) & _MASK
                if e:
                    v *= Fraction(p) ** e
            total += v
        return total

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, reverse=True):
            exps = unpack(k, self.nvars)
            mono = "*".join(f"x{i+1}^{e}" if e > 1 else f"x{i+1}"
                            for i, e in enumerate(exps) if e)
            c = self.terms[k]
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts)


def exact_div(a: MPoly, b: MPoly) -> MPoly:
    """Exact polynomial division a/b; raises ArithmeticError if not divisible.

    Used by fraction-free elimination, where divisibility is guaranteed.
    """
    if b.is_zero():
        raise ZeroDivisionError
    if a.is_zero():
        return a
    if b.is_constant():
        c = b.constant_value()
        if c == 1:
            return a
        return MPoly(a.nvars, {k: _coeff_div(v, c) for k, v in a.terms.items()})
    nvars = a.nvars
    kb, cb = b.leading()
    rem = dict(a.terms)
    out: dict[int, Fraction | int] = {}
    while rem:
        ka = max(rem)
        k = ka - kb
        if k < 0 or not _key_subtractable(ka, kb, nvars):
            raise ArithmeticError("inexact multivariate division")
        c = _coeff_div(rem[ka], cb)
        out[k] = c
        for kb2, cb2 in b.terms.items():
            kk = k + kb2
            s = rem.get(kk, 0) - c * cb2
            if s:
                rem[kk] = s
            else:
                rem.pop(kk, None)
    return MPoly(nvars, out)


def _coeff_div(a, b):
    if isinstance(a, int) and isinstance(b, int):
        q, r = divmod(a, b)
        if r == 0:
            return q
        return Fraction(a, b)
    return Fraction(a) / Fraction(b)


def _key_subtractable(ka: int, kb: int, nvars: int) -> bool:
    for i in range(nvars):
        sh = i * _SHIFT
        if ((ka >> sh) & _MASK) < ((kb >> sh) & _MASK):
            return False
    return True


def linear_poly(constant: Fraction | int, coeffs: Iterable[Fraction | int],
                nvars: int) -> MPoly:
    """Build constant + sum(coeffs[i] * x_{i+1})."""
    terms: dict[int, Fraction | int] = {}
    if constant != 0:
        terms[0] = constant
    for i, c in enumerate(coeffs):
        if c != 0:
            terms[1 << (i * _SHIFT)] = c
    return MPoly(nvars, terms)
