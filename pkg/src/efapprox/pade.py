"""Graded Pade approximants.

For multi-indices kappa with N-1 <= |kappa| <= N and functions f_1..f_m, find
polynomials P_kappa of degree < M, not all zero, such that every top-grade
remainder

    P_kappa + sum_j P_{kappa - e_j} f_j      (|kappa| = N)

vanishes at 0 to order at least K = floor((omega - eta) M / theta).  The
coefficients are kept in the z^nu/nu! basis, where the defining linear system
has small integer entries (binomials against series coefficients) and the
solved coefficient vector is scaled to a primitive integer vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .balls import log2_fraction
from .diffsys import DiffSystem
from .errors import InsufficientCoefficients
from .laurent import LaurentPoly
from .linalg import ExactMatrix, clear_denominators, kernel_vectors
from .series import ESeries

_F0 = Fraction(0)
_F1 = Fraction(1)

MultiIndex = tuple[int, ...]


def _compositions(total: int, parts: int):
    """Multi-indices in N^parts with given |.|, descending lexicographic."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class GradedIndex:
    """Index sets Omega (grades N-1 and N) and Theta (grade N).

    Ordering is graded, Theta first, descending lexicographic within each
    grade, so (N,0,...,0) sits at position 0 and (N-1,0,...,0) at position
    theta.  Those two rows drive the Diophantine extraction.
    """

    m: int
    N: int
    omega_set: tuple[MultiIndex, ...]
    theta_set: tuple[MultiIndex, ...]

    @property
    def omega(self) -> int:
        return len(self.omega_set)

    @property
    def theta(self) -> int:
        return len(self.theta_set)

    def position(self, kappa: MultiIndex) -> Optional[int]:
        """Index of kappa in Omega order; None for indices outside Omega
        (including any with a negative component, the omitted-term rule)."""
        return self._pos.get(kappa)

    @property
    def _pos(self) -> dict:
        d = self.__dict__.get("_pos_cache")
        if d is None:
            d = {k: i for i, k in enumerate(self.omega_set)}
            self.__dict__["_pos_cache"] = d
        return d

    @property
    def top_index(self) -> MultiIndex:
        """(N, 0, ..., 0)"""
        return self.omega_set[0]

    @property
    def second_index(self) -> MultiIndex:
        """(N-1, 0, ..., 0)"""
        return self.omega_set[self.theta]

    def ratio_identity_holds(self) -> bool:
        lhs = Fraction(self.omega, self.theta)
        return lhs == 2 - Fraction(self.m - 1, self.N + self.m - 1) and \
            lhs == 1 + Fraction(self.N, self.N + self.m - 1)


def build_index(m: int, N: int) -> GradedIndex:
    if m < 1 or N < 1:
        raise ValueError("need m >= 1 and N >= 1")
    theta_set = tuple(_compositions(N, m))
    lower = tuple(_compositions(N - 1, m))
    idx = GradedIndex(m, N, theta_set + lower, theta_set)
    assert idx.theta == math.comb(N + m - 1, m - 1)
    assert idx.omega == math.comb(N + m - 2, m - 1) + math.comb(N + m - 1, m - 1)
    assert idx.ratio_identity_holds()
    return idx


@dataclass(frozen=True)
class PadeParams:
    """M, eta and the vanishing order K = floor((omega - eta) M / theta)."""

    M: int
    eta: Fraction
    K: int


def make_params(idx: GradedIndex, M: int, eta: Fraction | int | str) -> PadeParams:
    """Validate eta against both constraints and compute K.

    eta must satisfy eta <= 1/(3(N+m-1)) and eta <= 1/(omega+1); the second
    keeps the rank certificate regime.  The count theta*K < omega*M of
    conditions versus unknowns then guarantees a nonzero kernel.
    """
    eta = Fraction(eta)
    if M < 1:
        raise ValueError("M must be >= 1")
    if eta <= 0:
        raise ValueError("eta must be positive")
    cap1 = Fraction(1, 3 * (idx.N + idx.m - 1))
    cap2 = Fraction(1, idx.omega + 1)
    if eta > cap1:
        raise ValueError(f"eta={eta} violates eta <= 1/(3(N+m-1)) = {cap1}")
    if eta > cap2:
        raise ValueError(f"eta={eta} violates eta <= 1/(omega+1) = {cap2}")
    K = math.floor((idx.omega - eta) * M / idx.theta)
    if not idx.theta * K < idx.omega * M:
        raise AssertionError("condition count must stay below unknown count")
    return PadeParams(M, eta, K)


@dataclass(frozen=True)
class GradedPadeSystem:
    """Solved coefficients pi[kappa][nu], integers in the z^nu/nu! basis."""

    index: GradedIndex
    params: PadeParams
    pi: dict[MultiIndex, tuple[int, ...]]

    @property
    def max_abs_pi(self) -> int:
        return max(max(abs(v) for v in row) for row in self.pi.values())

    def polynomial(self, kappa: MultiIndex) -> LaurentPoly:
        """P_kappa(z) = sum_nu pi[kappa][nu] z^nu / nu!; zero outside Omega."""
        row = self.pi.get(kappa)
        if row is None:
            return LaurentPoly.zero()
        return LaurentPoly(0, [Fraction(c, math.factorial(nu))
                               for nu, c in enumerate(row)])

    def polynomial_vector(self) -> list[LaurentPoly]:
        return [self.polynomial(k) for k in self.index.omega_set]


def condition_matrix(series: Sequence[ESeries], idx: GradedIndex,
                     params: PadeParams) -> ExactMatrix:
    """The theta*K x omega*M system; row (kappa, s) is s! times the
    coefficient of z^s in P_kappa + sum_j P_{kappa - e_j} f_j."""
    m, M, K = idx.m, params.M, params.K
    coeffs = []
    try:
        coeffs = [f.coefficients(K - 1) for f in series]
    except InsufficientCoefficients:
        raise
    ncols = idx.omega * M
    rows = []
    for kappa in idx.theta_set:
        pos_k = idx.position(kappa)
        neighbor = []
        for j in range(m):
            kj = list(kappa)
            kj[j] -= 1
            neighbor.append(idx.position(tuple(kj)) if kj[j] >= 0 else None)
        for s in range(K):
            row = [_F0] * ncols
            if s < M:
                row[pos_k * M + s] = _F1
            binom = 1
            for nu in range(min(s, M - 1) + 1):
                # binom = C(s, nu)
                for j in range(m):
                    p = neighbor[j]
                    if p is not None:
                        a = coeffs[j][s - nu]
                        if a != 0:
                            row[p * M + nu] += binom * a
                binom = binom * (s - nu) // (nu + 1)
            rows.append(row)
    return ExactMatrix.from_rows(rows)


def construct(sys: DiffSystem | None, series: Sequence[ESeries], idx: GradedIndex,
              params: PadeParams) -> GradedPadeSystem:
    """Solve for one primitive integer coefficient vector.

    The solution is the first canonical kernel vector of the condition
    matrix under the deterministic elimination order, with denominators
    cleared and content divided out, so identical inputs give bit-identical
    output.
    """
    if sys is not None and sys.m != idx.m:
        raise ValueError("system size does not match index set")
    if len(series) != idx.m:
        raise ValueError("need one series per function")
    mat = condition_matrix(series, idx, params)
    kernel = kernel_vectors(mat)
    if not kernel:
        raise AssertionError("empty kernel despite theta K < omega M")
    ints, _scale = clear_denominators(kernel[0])
    assert any(ints), "zero kernel vector"
    M = params.M
    pi = {}
    for i, kappa in enumerate(idx.omega_set):
        pi[kappa] = tuple(ints[i * M:(i + 1) * M])
    return GradedPadeSystem(idx, params, pi)


def remainder_series(g: GradedPadeSystem, series: Sequence[ESeries],
                     kappa: MultiIndex, order: int) -> LaurentPoly:
    """Truncated series of P_kappa + sum_j P_{kappa-e_j} f_j."""
    idx = g.index
    acc = g.polynomial(kappa).truncate(order)
    for j in range(idx.m):
        kj = list(kappa)
        kj[j] -= 1
        if kj[j] < 0:
            continue
        p = g.polynomial(tuple(kj))
        if p.is_zero():
            continue
        f = series[j].taylor_polynomial(order)
        acc = acc + (p * f).truncate(order)
    return acc


def verify_vanishing(g: GradedPadeSystem, series: Sequence[ESeries],
                     check_order: int | None = None) -> dict[MultiIndex, int | None]:
    """Exact vanishing order at 0 of each Theta remainder.

    Values are the order of the first nonzero coefficient, or None when the
    remainder vanishes through the whole checked window (order >= checked).
    """
    idx, params = g.index, g.params
    order = check_order if check_order is not None else params.K + params.M + 8
    out: dict[MultiIndex, int | None] = {}
    for kappa in idx.theta_set:
        r = remainder_series(g, series, kappa, order)
        out[kappa] = r.order_at_zero()
    return out


def coefficient_growth_report(g: GradedPadeSystem) -> tuple[int, float]:
    """(max |pi|, log(max|pi|)/M) for growth-trend bookkeeping; no pass/fail."""
    mx = g.max_abs_pi
    if mx == 0:
        return 0, 0.0
    return mx, log2_fraction(Fraction(mx)) * math.log(2) / g.params.M
