"""Remainder derivation: the closure matrix A, iterated polynomial vectors,
local solutions at z=1, and rank certificates.

Writing P for the solved Pade vector, the derivatives of every remainder
R(Y) = sum_kappa P_kappa y_kappa along solutions of Y' = A Y are encoded by

    P_{k+1} = (d/dz + A^t) P_k          (rational-function vectors)
    P^[k+1] = T (d/dz + A^t) P^[k]      (polynomial vectors, T clears poles)

with P_1 = P^[1] = P.  Both tables are kept: the bracket one has integer
coefficients in the z^nu/nu! basis (asserted, not assumed), the plain one
feeds the remainder-derivative identity.  Their evaluation matrices at z=1
have the same rank for every prefix because T(1) is a nonzero integer and the
two iterations differ by a unit triangular change of rows; the certificate
checks that identity exactly instead of trusting it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .balls import BallValue
from .diffsys import DiffSystem
from .errors import IntegralityViolated, NotDesingularized
from .laurent import LaurentMatrix, LaurentPoly
from .linalg import rank_fraction_rows
from .pade import GradedIndex, GradedPadeSystem, MultiIndex

_F0 = Fraction(0)
_F1 = Fraction(1)


@dataclass(frozen=True)
class SystemClosure:
    """A with the graded index structure, plus the pole-clearing monomial T."""

    idx: GradedIndex
    sys: DiffSystem
    A: LaurentMatrix
    tau: int
    i_exp: int
    t: int

    @property
    def T(self) -> LaurentPoly:
        return LaurentPoly.monomial(self.tau, self.i_exp)


def build_A(sys: DiffSystem, idx: GradedIndex) -> SystemClosure:
    """Populate A entrywise and certify the clearing monomial T.

    Entry (lambda, kappa) is -lambda_j S_{l,j} when kappa = lambda - e_j + e_l
    with j != l, the diagonal -sum_j lambda_j S_{j,j} when kappa = lambda, and
    S_{j,0} when kappa = lambda + e_j with |lambda| = N - 1.
    """
    if sys.m != idx.m:
        raise ValueError("system size does not match index set")
    m, N = idx.m, idx.N
    # T = tau z^i: least common denominator over all entries
    tau = 1
    i_exp = 0
    for e in sys.S.entries:
        if e.is_zero():
            continue
        if e.low < 0:
            i_exp = max(i_exp, -e.low)
        tau = tau * e.denominator_lcm() // math.gcd(tau, e.denominator_lcm())
    T = LaurentPoly.monomial(tau, i_exp)
    t = T.degree()
    for e in sys.S.entries:
        cleared = T * e
        if not cleared.is_polynomial():
            raise NotDesingularized("T does not clear a system entry")
        if any(c.denominator != 1 for c in cleared.coeffs):
            raise NotDesingularized("T does not clear the entry denominators")
        t = max(t, cleared.degree())

    omega = idx.omega
    zero = LaurentPoly.zero()
    entries = [zero] * (omega * omega)
    for li, lam in enumerate(idx.omega_set):
        for ki, kap in enumerate(idx.omega_set):
            if kap == lam:
                acc = zero
                for j in range(m):
                    if lam[j]:
                        acc = acc - sys.entry(j + 1, j + 1) * lam[j]
                entries[li * omega + ki] = acc
                continue
            diff = tuple(k - l for k, l in zip(kap, lam))
            neg = [j for j, d in enumerate(diff) if d < 0]
            pos = [j for j, d in enumerate(diff) if d > 0]
            if len(neg) == 1 and len(pos) == 1 and \
                    diff[neg[0]] == -1 and diff[pos[0]] == 1:
                j, l = neg[0], pos[0]  # kappa = lambda - e_j + e_l
                entries[li * omega + ki] = -sys.entry(l + 1, j + 1) * lam[j]
            elif len(neg) == 0 and len(pos) == 1 and diff[pos[0]] == 1 \
                    and sum(lam) == N - 1:
                j = pos[0]  # kappa = lambda + e_j
                entries[li * omega + ki] = sys.entry(j + 1, 0)
    return SystemClosure(idx, sys, LaurentMatrix(omega, omega, entries),
                         tau, i_exp, t)


@dataclass(frozen=True)
class IterTable:
    """Rows k = 1..k_max of both iterated vectors, in GradedIndex order."""

    closure: SystemClosure
    source: GradedPadeSystem
    bracket: tuple[tuple[LaurentPoly, ...], ...]
    plain: tuple[tuple[LaurentPoly, ...], ...]

    @property
    def k_max(self) -> int:
        return len(self.bracket)

    def bracket_at_one(self) -> list[list[Fraction]]:
        """omega x k_max matrix of P^[k]_kappa(1)."""
        omega = self.closure.idx.omega
        return [[self.bracket[k][i].evaluate_at(1) for k in range(self.k_max)]
                for i in range(omega)]

    def plain_at_one(self) -> list[list[Fraction]]:
        return [[self.plain[k][i].evaluate_at(1) for k in range(self.k_max)]
                for i in range(self.closure.idx.omega)]

    def bracket_pi(self, k: int, kappa: MultiIndex) -> tuple[int, ...]:
        """Integer coefficients of P^[k]_kappa in the z^nu/nu! basis."""
        poly = self.bracket[k - 1][self.closure.idx.position(kappa)]
        out = []
        for nu in range(poly.degree() + 1):
            c = poly.coefficient(nu) * math.factorial(nu)
            if c.denominator != 1:
                raise IntegralityViolated(
                    f"pi[{k}][{kappa}][{nu}] = {c} is not an integer")
            out.append(int(c))
        return tuple(out)


def _step(closure: SystemClosure, vec: Sequence[LaurentPoly],
          with_T: bool) -> list[LaurentPoly]:
    """(d/dz + A^t) applied to a vector, optionally multiplied by T."""
    A, idx = closure.A, closure.idx
    omega = idx.omega
    out = []
    for ki in range(omega):
        acc = vec[ki].differentiate()
        for li in range(omega):
            a = A.entry(li, ki)
            if not a.is_zero() and not vec[li].is_zero():
                acc = acc + a * vec[li]
        out.append(acc)
    if with_T:
        T = closure.T
        out = [T * p for p in out]
    return out


def iterate_bracket(closure: SystemClosure, g: GradedPadeSystem,
                    k_max: int) -> IterTable:
    """Iterate both recursions from the Pade vector, checking invariants.

    Each bracket row is verified to be polynomial, to satisfy the degree
    bound deg <= M + t(k-1), and to have integer z^nu/nu! coefficients.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    base = tuple(g.polynomial_vector())
    bracket = [base]
    plain = [base]
    M, t = g.params.M, closure.t
    for k in range(1, k_max):
        bracket.append(tuple(_step(closure, bracket[-1], with_T=True)))
        plain.append(tuple(_step(closure, plain[-1], with_T=False)))
        for p in bracket[-1]:
            if not p.is_polynomial():
                raise IntegralityViolated("bracket entry has a pole")
            if p.degree() > M + t * k - 1:
                raise AssertionError("bracket degree bound violated")
    table = IterTable(closure, g, tuple(bracket), tuple(plain))
    for k in range(1, k_max + 1):
        for kappa in closure.idx.omega_set:
            table.bracket_pi(k, kappa)  # raises IntegralityViolated on failure
    return table


@dataclass(frozen=True)
class RankCertificate:
    """Exact rank data for the evaluation matrix (P^[k]_kappa(1))."""

    k_max: int
    evaluation: tuple[tuple[Fraction, ...], ...]  # omega rows, k_max cols
    rank: int
    witness_columns: tuple[int, ...]  # 1-based k indices of a full-rank minor
    pair: tuple[int, int] | None  # (k1, k2) for the two distinguished rows
    prefix_identity: bool  # bracket/plain ranks agree for every prefix

    @property
    def full(self) -> bool:
        return self.rank == len(self.evaluation)


def _pivot_columns(rows: list[list[Fraction]]) -> list[int]:
    work = [row[:] for row in rows]
    from .linalg import rref_fraction
    _, pivots = rref_fraction(work)
    return pivots


def rank_certificate(table: IterTable) -> RankCertificate:
    """Certify the rank of the bracket evaluation matrix at z=1.

    Also finds the smallest (k1, k2) with a nonzero 2x2 minor on the rows
    (N,0,..,0) and (N-1,0,..,0), and checks that bracket and plain prefixes
    have equal rank for every k0 <= k_max.
    """
    closure = table.closure
    idx = closure.idx
    ev = table.bracket_at_one()
    ev_plain = table.plain_at_one()
    k_max = table.k_max

    prefix_ok = True
    for k0 in range(1, k_max + 1):
        rb = rank_fraction_rows([row[:k0] for row in ev])
        rp = rank_fraction_rows([row[:k0] for row in ev_plain])
        if rb != rp:
            prefix_ok = False
            break

    # rank and witness columns: RREF pivot columns are the lexicographically
    # first maximal independent set of k-columns
    pivots = _pivot_columns([row[:] for row in ev]) if ev else []
    rank = len(pivots)
    witness = tuple(p + 1 for p in pivots)

    top = idx.position(idx.top_index)
    second = idx.position(idx.second_index)
    pair = None
    for k1 in range(1, k_max + 1):
        for k2 in range(k1 + 1, k_max + 1):
            det = (ev[top][k1 - 1] * ev[second][k2 - 1]
                   - ev[top][k2 - 1] * ev[second][k1 - 1])
            if det != 0:
                pair = (k1, k2)
                break
        if pair:
            break

    cert = RankCertificate(k_max, tuple(tuple(r) for r in ev), rank,
                           witness, pair, prefix_ok)
    if cert.full and len(witness) != idx.omega:
        raise AssertionError("witness size mismatch")
    return cert


def rank_certificate_auto(closure: SystemClosure, g: GradedPadeSystem
                          ) -> tuple[RankCertificate, IterTable]:
    """Iterate with the default k budget, doubling on deficiency, up to M.

    The proposition behind this guarantees full rank by floor(eta M) plus a
    constant that is not explicit, hence the empirical schedule; the returned
    certificate records the k actually needed.
    """
    M = g.params.M
    k = min(math.floor(g.params.eta * M) + 32, max(M, 2))
    while True:
        table = iterate_bracket(closure, g, k)
        cert = rank_certificate(table)
        if cert.full or k >= M:
            return cert, table
        k = min(2 * k, M)


# ---------------------------------------------------------------------------
# Local solutions of Y' = A Y at z = 1 and the derivative identity
# ---------------------------------------------------------------------------

def _binomial_series_pow(e: int, order: int) -> list[Fraction]:
    """Coefficients of (1+u)^e up to u^order, for any integer e."""
    out = [_F1]
    c = _F1
    for i in range(1, order + 1):
        c = c * Fraction(e - i + 1, i)
        out.append(c)
    return out


def _matrix_series_at_one(A: LaurentMatrix, order: int) -> list[list[list[Fraction]]]:
    """A(1+u) as a list of coefficient matrices A_0..A_order."""
    n = A.rows
    out = [[[_F0] * A.cols for _ in range(n)] for _ in range(order + 1)]
    for i in range(n):
        for j in range(A.cols):
            entry = A.entry(i, j)
            for e, c in entry.items():
                pows = _binomial_series_pow(e, order)
                for d in range(order + 1):
                    out[d][i][j] += c * pows[d]
    return out


def local_solution_at_one(closure: SystemClosure, initial: Sequence,
                          order: int) -> list[list]:
    """Power-series solution of Y' = A Y around z=1 with Y(1) = initial.

    Coefficient vectors c_n of (z-1)^n satisfy (n+1) c_{n+1} = sum A_i c_{n-i};
    the truncated expansion of A is exact for every returned coefficient.
    Scalars may be Fractions or BallValues; they only need + and *.
    """
    omega = closure.idx.omega
    if len(initial) != omega:
        raise ValueError("initial vector has wrong length")
    a_series = _matrix_series_at_one(closure.A, max(order - 1, 0))
    coeffs = [list(initial)]
    for n in range(order):
        nxt = []
        for i in range(omega):
            acc = None
            for d in range(n + 1):
                ad = a_series[d]
                row = ad[i]
                prev = coeffs[n - d]
                for j in range(omega):
                    if row[j] == 0:
                        continue
                    term = prev[j] * row[j]
                    acc = term if acc is None else acc + term
            if acc is None:
                acc = _F0 * initial[i] if not isinstance(initial[i], Fraction) else _F0
            nxt.append(acc * Fraction(1, n + 1))
        coeffs.append(nxt)
    return coeffs


def remainder_derivative_check(table: IterTable, y_coeffs: list[list],
                               k_max: int) -> list[BallValue]:
    """Defect of R(Y)^(k-1)(1) = sum P_{k,kappa}(1) y_kappa(1) for k <= k_max.

    The left side comes from the local series of sum P_kappa y_kappa, the
    right side from the plain iterated vector at 1.  Every defect ball must
    contain 0; a fault anywhere in A, the iteration, or the solver makes some
    ball exclude it.
    """
    closure = table.closure
    idx = closure.idx
    if k_max > table.k_max:
        raise ValueError("table too short")
    if len(y_coeffs) < k_max:
        raise ValueError("local solution too short")
    from .laurent import taylor_shift_one
    p_shift = [taylor_shift_one(p) for p in table.bracket[0]]
    # series of R(z) = sum P_kappa y_kappa in u = z-1
    r_series: list = []
    for n in range(k_max):
        acc = None
        for i in range(idx.omega):
            for d in range(n + 1):
                c = p_shift[i].coefficient(d)
                if c == 0:
                    continue
                term = y_coeffs[n - d][i] * c
                acc = term if acc is None else acc + term
        r_series.append(acc if acc is not None else _F0)
    plain1 = table.plain_at_one()
    defects = []
    for k in range(1, k_max + 1):
        lhs = r_series[k - 1] * Fraction(math.factorial(k - 1))
        rhs = None
        for i in range(idx.omega):
            v = plain1[i][k - 1]
            if v == 0:
                continue
            term = y_coeffs[0][i] * v
            rhs = term if rhs is None else rhs + term
        if rhs is None:
            rhs = _F0
        diff = lhs - rhs
        if isinstance(diff, Fraction):
            diff = BallValue.exact(diff)
        defects.append(abs(diff))
    return defects
