"""Exact linear algebra over Q and over rational function fields.

Rank, right kernel and determinants, all certified:

* Over Q the reference path is exact fraction Gauss-Jordan.  Large systems
  take a modular fast path: reduced row echelon form modulo a fixed ladder of
  30-bit primes (vectorized with numpy), CRT accumulation, rational
  reconstruction, and then *exact* verification by integer multiply-back.
  The rank is certified on both sides: a nonzero r x r minor mod p bounds the
  rank below, and cols - r exactly verified kernel vectors bound it above,
  so no Schwartz-Zippel failure can leak into a certificate.  The prime
  ladder is fixed, so results are deterministic.

* Over Q(x_1..x_m) entries are :class:`~efapprox.mpoly.MPoly` and rank comes
  from fraction-free Bareiss elimination on the polynomial matrix (the rank
  over the fraction field equals the size of the largest nonvanishing minor).
  A randomized rational-substitution prescreen can propose a rank cheaply,
  but certified answers always come from the exact elimination.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ZeroVector
from .mpoly import MPoly, exact_div

_F0 = Fraction(0)
_F1 = Fraction(1)

Scalar = Fraction  # entries of rational matrices


class ExactMatrix:
    """Immutable dense matrix with Fraction or MPoly entries (row-major)."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Sequence):
        if len(entries) != rows * cols:
            raise ValueError("entry count mismatch")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", tuple(entries))

    def __setattr__(self, *a):
        raise AttributeError("ExactMatrix is immutable")

    @staticmethod
    def from_rows(rows_of_entries: Sequence[Sequence]) -> "ExactMatrix":
        r = len(rows_of_entries)
        c = len(rows_of_entries[0]) if r else 0
        flat = []
        for row in rows_of_entries:
            if len(row) != c:
                raise ValueError("ragged rows")
            flat.extend(row)
        return ExactMatrix(r, c, flat)

    @staticmethod
    def identity(n: int) -> "ExactMatrix":
        return ExactMatrix(n, n, [_F1 if i == j else _F0
                                  for i in range(n) for j in range(n)])

    @staticmethod
    def zeros(rows: int, cols: int) -> "ExactMatrix":
        return ExactMatrix(rows, cols, [_F0] * (rows * cols))

    def entry(self, i: int, j: int):
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> tuple:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_lists(self) -> list[list]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.cols, self.rows,
                           [self.entry(i, j) for j in range(self.cols)
                            for i in range(self.rows)])

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        flat = []
        for i in range(self.rows):
            flat.extend(self.row(i))
            flat.extend(other.row(i))
        return ExactMatrix(self.rows, self.cols + other.cols, flat)

    def matmul(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        flat = []
        for i in range(self.rows):
            for j in range(other.cols):
                acc = self.entry(i, 0) * other.entry(0, j) if self.cols else _F0
                for k in range(1, self.cols):
                    acc = acc + self.entry(i, k) * other.entry(k, j)
                flat.append(acc)
        return ExactMatrix(self.rows, other.cols, flat)

    def is_polynomial(self) -> bool:
        return any(isinstance(e, MPoly) for e in self.entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and \
            all(a == b for a, b in zip(self.entries, other.entries))

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return f"ExactMatrix({self.rows}x{self.cols})"


# ---------------------------------------------------------------------------
# Exact rational Gauss-Jordan (reference path)
# ---------------------------------------------------------------------------

def rref_fraction(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """In-place reduced row echelon form; returns (rows, pivot column indices)."""
    if not rows:
        return rows, []
    nrows, ncols = len(rows), len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if rows[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = _F1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots


def kernel_from_rref(rref: list[list[Fraction]], pivots: list[int],
                     ncols: int) -> list[list[Fraction]]:
    """Canonical right-kernel basis, one vector per free column, in column order."""
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [_F0] * ncols
        v[free] = _F1
        for i, p in enumerate(pivots):
            v[p] = -rref[i][free]
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# Modular fast path with exact certification
# ---------------------------------------------------------------------------

_PRIME_CACHE: list[int] = []


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _prime_ladder(count: int) -> list[int]:
    """Fixed, deterministic list of primes just below 2^30."""
    global _PRIME_CACHE
    candidate = _PRIME_CACHE[-1] - 2 if _PRIME_CACHE else (1 << 30) - 1
    while len(_PRIME_CACHE) < count:
        if _is_prime(candidate):
            _PRIME_CACHE.append(candidate)
        candidate -= 2
    return _PRIME_CACHE[:count]


def _mod_rref(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """RREF of an int64 matrix mod p (entries already reduced)."""
    a = a % p
    nrows, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        col = a[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        rows_nz = np.nonzero(a[:, c])[0]
        rows_nz = rows_nz[rows_nz != r]
        if rows_nz.size:
            a[rows_nz] = (a[rows_nz] - np.outer(a[rows_nz, c], a[r])) % p
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return a, pivots


def _rat_reconstruct(residue: int, modulus: int) -> Fraction | None:
    """Rational reconstruction of residue mod modulus (|num|,|den| <= sqrt(m/2))."""
    bound = math.isqrt(modulus // 2)
    r0, r1 = modulus, residue % modulus
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if t1 == 0 or abs(t1) > bound:
        return None
    if math.gcd(r1, abs(t1)) != 1:
        return None
    return Fraction(r1, t1)


def _int_rows_from_fractions(rows: list[list[Fraction]]) -> list[list[int]]:
    out = []
    for row in rows:
        lcm = 1
        for x in row:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        out.append([int(x * lcm) for x in row])
    return out


def _kernel_modular(int_rows: list[list[int]], ncols: int,
                    max_primes: int = 1024) -> list[list[Fraction]] | None:
    """Certified kernel basis of an integer matrix via CRT-lifted modular RREF.

    Returns the canonical RREF kernel basis, or None if the prime budget is
    exhausted (caller falls back to exact elimination).  Every returned
    vector has been verified exactly against the integer matrix, and the
    basis size is certified by a nonzero modular minor of complementary rank.
    """
    nrows = len(int_rows)
    if nrows == 0 or ncols == 0:
        return [[_F1 if i == j else _F0 for i in range(ncols)] for j in range(ncols)]

    # Unlucky primes can only lose rank or push pivots lexicographically
    # later, so the lex-smallest pivot set of maximal length is the candidate
    # for the true pivot structure.
    best_pivots: list[int] | None = None
    residues: list[np.ndarray] = []
    moduli: list[int] = []
    batch = 8
    used = 0

    while used < max_primes:
        for p in _prime_ladder(used + batch)[used:]:
            a = np.array([[x % p for x in row] for row in int_rows], dtype=np.int64)
            rref, pivots = _mod_rref(a, p)
            if best_pivots is None or len(pivots) > len(best_pivots) or \
                    (len(pivots) == len(best_pivots) and pivots < best_pivots):
                best_pivots, residues, moduli = pivots, [], []
            if pivots == best_pivots:
                residues.append(rref[:len(pivots)])
                moduli.append(p)
        used += batch
        batch = min(2 * batch, 64)

        if not residues:
            continue
        lifted = _try_lift(residues, moduli, best_pivots, ncols)
        if lifted is None:
            continue
        if _verify_kernel(int_rows, lifted):
            return lifted
    return None


def _try_lift(residues: list[np.ndarray], moduli: list[int],
              pivots: list[int], ncols: int) -> list[list[Fraction]] | None:
    # CRT-combine the RREF free-column entries (python ints; they exceed
    # int64 after a couple of primes), then rationally reconstruct.
    r = len(pivots)
    free_cols = [c for c in range(ncols) if c not in set(pivots)]
    big = [[0] * len(free_cols) for _ in range(r)]
    modulus = 1
    for a, p in zip(residues, moduli):
        for i in range(r):
            row = a[i]
            bi = big[i]
            for jj, c in enumerate(free_cols):
                x = int(row[c])
                if modulus == 1:
                    bi[jj] = x
                else:
                    cur = bi[jj]
                    diff = (x - cur) % p
                    bi[jj] = cur + modulus * (diff * pow(modulus % p, p - 2, p) % p)
        modulus *= p
    basis = []
    for jj, free in enumerate(free_cols):
        v: list[Fraction] = [_F0] * ncols
        v[free] = _F1
        for i, pc in enumerate(pivots):
            q = _rat_reconstruct(big[i][jj] % modulus, modulus)
            if q is None:
                return None
            v[pc] = -q
        basis.append(v)
    return basis


def _verify_kernel(int_rows: list[list[int]], basis: list[list[Fraction]]) -> bool:
    for v in basis:
        lcm = 1
        for x in v:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        iv = [int(x * lcm) for x in v]
        for row in int_rows:
            if sum(a * b for a, b in zip(row, iv)) != 0:
                return False
    return True


# ---------------------------------------------------------------------------
# Fraction-free Bareiss elimination (integers and polynomials)
# ---------------------------------------------------------------------------

def bareiss_det_int(rows: list[list[int]]) -> int:
    """Determinant of a square integer matrix, fraction-free."""
    n = len(rows)
    if n == 0:
        return 1
    a = [row[:] for row in rows]
    prev = 1
    sign = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def rank_int_rows(rows: list[list[int]]) -> int:
    """Rank of an integer matrix by fraction-free elimination."""
    if not rows or not rows[0]:
        return 0
    a = [row[:] for row in rows]
    nrows, ncols = len(a), len(a[0])
    prev = 1
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if a[i][c]:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        if pivot_row != r:
            a[r], a[pivot_row] = a[pivot_row], a[r]
        piv = a[r][c]
        for i in range(r + 1, nrows):
            fi = a[i][c]
            if fi or any(a[i][c + 1:]):
                row_i, row_r = a[i], a[r]
                for j in range(c + 1, ncols):
                    row_i[j] = (piv * row_i[j] - fi * row_r[j]) // prev
                row_i[c] = 0
        prev = piv
        r += 1
        if r == nrows:
            break
    return r


def rank_bareiss_poly(rows: list[list[MPoly]]) -> int:
    """Rank over the fraction field via fraction-free elimination.

    Pivot choice prefers the fewest-term nonzero entry in the pivot column
    block, a cheap heuristic against intermediate blowup.
    """
    if not rows:
        return 0
    nvars = next((e.nvars for row in rows for e in row if isinstance(e, MPoly)), 1)
    a = [[e if isinstance(e, MPoly) else MPoly.const(e, nvars) for e in row]
         for row in rows]
    nrows, ncols = len(a), len(a[0])
    prev: MPoly | None = None
    r = 0
    for c in range(ncols):
        pivot_row = None
        best = None
        for i in range(r, nrows):
            if not a[i][c].is_zero():
                size = len(a[i][c].terms)
                if best is None or size < best:
                    best, pivot_row = size, i
        if pivot_row is None:
            continue
        if pivot_row != r:
            a[r], a[pivot_row] = a[pivot_row], a[r]
        piv = a[r][c]
        for i in range(r + 1, nrows):
            if all(a[i][j].is_zero() for j in range(c, ncols)):
                continue
            fi = a[i][c]
            for j in range(c + 1, ncols):
                num = piv * a[i][j] - fi * a[r][j]
                a[i][j] = exact_div(num, prev) if prev is not None else num
            a[i][c] = MPoly.zero(nvars)
        prev = piv
        r += 1
        if r == nrows:
            break
    return r


def rank_prescreen_poly(rows: list[list[MPoly]], point: Sequence[Fraction | int]) -> int:
    """Rank after substituting a rational point: a lower bound on the true rank."""
    ev = [[e.evaluate(point) if isinstance(e, MPoly) else Fraction(e) for e in row]
          for row in rows]
    _, pivots = rref_fraction(ev)
    return len(pivots)


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

_MODULAR_THRESHOLD = 2400  # rows*cols above which the modular path kicks in


def rank(m: ExactMatrix) -> int:
    """Exact rank over the matrix's field (Q, or Q(x..) for MPoly entries)."""
    if m.is_polynomial():
        return rank_bareiss_poly(m.to_lists())
    return m.cols - len(kernel_vectors(m))


def kernel_basis(m: ExactMatrix) -> list[ExactMatrix]:
    """Basis of the right null space, as cols x 1 matrices; M v = 0 exactly."""
    vecs = kernel_vectors(m)
    return [ExactMatrix(m.cols, 1, v) for v in vecs]


def kernel_vectors(m: ExactMatrix, force_exact: bool = False) -> list[list[Fraction]]:
    """Canonical RREF kernel basis as lists of Fractions.

    Large rational matrices take the certified modular path; everything else
    (and any modular budget exhaustion) uses exact fraction elimination.
    """
    if m.is_polynomial():
        raise NotImplementedError("kernel over function fields is not needed here")
    rows = [[Fraction(e) for e in m.row(i)] for i in range(m.rows)]
    if not force_exact and m.rows * m.cols > _MODULAR_THRESHOLD:
        int_rows = _int_rows_from_fractions(rows)
        got = _kernel_modular(int_rows, m.cols)
        if got is not None:
            return got
    rref, pivots = rref_fraction(rows)
    return kernel_from_rref(rref, pivots, m.cols)


def rank_fraction_rows(rows: list[list[Fraction]]) -> int:
    work = [row[:] for row in rows]
    _, pivots = rref_fraction(work)
    return len(pivots)


def clear_denominators(v: Sequence[Fraction]) -> tuple[list[int], int]:
    """Scale a rational vector to a primitive integer vector.

    Returns (w, scaling) with scaling the lcm of denominators; w is
    scaling*v divided by its content, so gcd of the entries of w is 1.
    """
    vec = [Fraction(x) for x in v]
    if all(x == 0 for x in vec):
        raise ZeroVector("cannot clear denominators of the zero vector")
    lcm = 1
    for x in vec:
        lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    ints = [int(x * lcm) for x in vec]
    g = 0
    for x in ints:
        g = math.gcd(g, abs(x))
    return [x // g for x in ints], lcm
