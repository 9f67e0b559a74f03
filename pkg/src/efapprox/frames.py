"""Nondegeneracy laboratory for the frame inequality.

The frame F is spanned by Z_kappa = E_kappa + sum_j x_j E_{kappa-e_j} over
the top grade |kappa| = N, with x_1..x_m independent indeterminates standing
for the transcendental coordinates.  For any subspace R of the ambient space
defined over Q, the inequality

    dim R >= (2 - (m-1)/(N+m-1)) dim(F cap R)

holds with equality only for R trivial or full; this module computes both
sides exactly over the rational function field and sweeps random rational
subspaces against it.

dim(F cap R) is computed via the Schur complement of the frame's identity
block: columns of [Z | R] reduce to an (omega - theta) x dim R matrix S with
entries R[lam, c] - sum_j x_j R[lam + e_j, c], linear in the x's, and
dim(F cap R) = dim R - rank S over Q(x).  Ranks of such pencils come from
fraction-free elimination (exact), keeping the sweep certificate-grade.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .linalg import (ExactMatrix, clear_denominators, kernel_vectors,
                     rank_bareiss_poly, rank_int_rows, rank_fraction_rows,
                     rref_fraction)
from .mpoly import MPoly, linear_poly
from .pade import GradedIndex, MultiIndex, build_index

_F0 = Fraction(0)
_F1 = Fraction(1)


def _primitive_int_columns(columns: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    """Scale each column to a primitive integer vector (span-preserving)."""
    out = []
    for col in columns:
        if any(col):
            ints, _ = clear_denominators(col)
        else:
            ints = [0] * len(col)
        out.append(ints)
    return out


@dataclass(frozen=True)
class ThetaFrame:
    """The frame columns Z_kappa, kappa in Theta, over Q(x_1..x_m)."""

    idx: GradedIndex

    @property
    def m(self) -> int:
        return self.idx.m

    @property
    def N(self) -> int:
        return self.idx.N

    def columns(self) -> list[list[MPoly]]:
        """Z_kappa as vectors of polynomials, in GradedIndex row order."""
        m = self.m
        nvars = m
        idx = self.idx
        cols = []
        for kappa in idx.theta_set:
            col = [MPoly.zero(nvars) for _ in range(idx.omega)]
            col[idx.position(kappa)] = MPoly.const(1, nvars)
            for j in range(m):
                down = _sub_e(kappa, j)
                if down is not None:
                    col[idx.position(down)] = MPoly.gen(j, nvars)
            cols.append(col)
        return cols

    def matrix(self) -> ExactMatrix:
        cols = self.columns()
        return ExactMatrix.from_rows(
            [[cols[c][r] for c in range(len(cols))] for r in range(self.idx.omega)])


def frame(m: int, N: int) -> ThetaFrame:
    return ThetaFrame(build_index(m, N))


def _sub_e(kappa: MultiIndex, j: int) -> MultiIndex | None:
    if kappa[j] == 0:
        return None
    out = list(kappa)
    out[j] -= 1
    return tuple(out)


def _add_e(kappa: MultiIndex, j: int) -> MultiIndex:
    out = list(kappa)
    out[j] += 1
    return tuple(out)


@dataclass(frozen=True)
class SubspaceBasis:
    """Rational basis columns of a subspace of the ambient C^Omega."""

    ambient: int
    columns: tuple[tuple[Fraction, ...], ...]

    @staticmethod
    def make(ambient: int, columns: Iterable[Sequence]) -> "SubspaceBasis":
        cols = tuple(tuple(Fraction(v) for v in col) for col in columns)
        for col in cols:
            if len(col) != ambient:
                raise ValueError("column length mismatch")
        return SubspaceBasis(ambient, cols)

    @property
    def dim_claimed(self) -> int:
        return len(self.columns)

    def dim(self) -> int:
        if not self.columns:
            return 0
        ints = _primitive_int_columns(self.columns)
        return rank_int_rows([list(row) for row in zip(*ints)])

    def is_full(self) -> bool:
        return self.dim() == self.ambient


def random_subspace(rng: random.Random, ambient: int, dim: int,
                    bound: int = 10) -> SubspaceBasis:
    """Random integer-entry basis, rejection-sampled to the requested dimension."""
    if dim == 0:
        return SubspaceBasis(ambient, ())
    while True:
        cols = [[Fraction(rng.randint(-bound, bound)) for _ in range(ambient)]
                for _ in range(dim)]
        cand = SubspaceBasis.make(ambient, cols)
        if cand.dim() == dim:
            return cand


# ---------------------------------------------------------------------------
# Intersection dimensions over the function field
# ---------------------------------------------------------------------------

def _schur_rows(fr: ThetaFrame, columns: Sequence[Sequence[Fraction]]
                ) -> list[list[MPoly]]:
    """S[lam, c] = R[lam, c] - sum_j x_j R[lam + e_j, c] on the lower grade.

    Columns are rescaled to primitive integer vectors first, so the pencil
    has integer coefficients and elimination avoids Fraction overhead.
    """
    idx = fr.idx
    m = fr.m
    ints = _primitive_int_columns(columns)
    rows = []
    for lam in idx.omega_set[idx.theta:]:
        up_pos = [idx.position(_add_e(lam, j)) for j in range(m)]
        lam_pos = idx.position(lam)
        row = []
        for col in ints:
            row.append(linear_poly(col[lam_pos], [-col[p] for p in up_pos], m))
        rows.append(row)
    return rows


_EVAL_POINTS = ((2, 3, 5, 7, 11, 13), (5, 7, 11, 13, 17, 19))


def _pencil_rank(rows: list[list[MPoly]]) -> int:
    """Certified rank of a linear pencil over Q(x).

    Evaluating at a rational point bounds the rank below; if the bound meets
    min(rows, cols) the rank is certified with no symbolic work at all (this
    is not a Schwartz-Zippel guess).  Anything short of that ceiling falls
    through to exact fraction-free elimination.
    """
    rows = [row for row in rows if any(not e.is_zero() for e in row)]
    if not rows or not rows[0]:
        return 0
    nvars = rows[0][0].nvars
    ceiling = min(len(rows), len(rows[0]))
    for point in _EVAL_POINTS:
        pt = point[:nvars]
        ev = [[_eval_linear_int(e, pt) for e in row] for row in rows]
        if rank_int_rows(ev) == ceiling:
            return ceiling
    return rank_bareiss_poly(rows)


def _eval_linear_int(p: MPoly, point: Sequence[int]) -> int:
    """Evaluate an integer-coefficient pencil entry at an integer point."""
    total = 0
    for k, c in p.terms.items():
        v = c
        kk = k
        i = 0
        while kk:
            e = kk & 0xFFFF
            if e:
                v *= point[i] ** e
            kk >>= 16
            i += 1
        total += v
    return total


def dim_frame_intersection(fr: ThetaFrame, space: SubspaceBasis) -> int:
    """dim(F cap R) = dim R - rank(Schur complement), exactly."""
    cols = space.columns
    if not cols:
        return 0
    return len(cols) - _pencil_rank(_schur_rows(fr, cols))


def _intersect_with_kernel_rows(space: SubspaceBasis,
                                zero_rows: Sequence[int]) -> SubspaceBasis:
    """Basis of the part of the space supported away from the given rows."""
    cols = space.columns
    if not cols:
        return space
    sub = [[col[r] for col in cols] for r in zero_rows]
    if not sub:
        return space
    mat = ExactMatrix.from_rows(sub)
    kern = kernel_vectors(mat)
    new_cols = []
    for v in kern:
        vec = [sum((c * col[r] for c, col in zip(v, cols)), _F0)
               for r in range(space.ambient)]
        new_cols.append(tuple(vec))
    return SubspaceBasis(space.ambient, tuple(new_cols))


def coordinate_kernel_rows(idx: GradedIndex) -> list[int]:
    """Positions kappa with kappa_m >= 1 (complement of the subspace K)."""
    return [i for i, k in enumerate(idx.omega_set) if k[idx.m - 1] >= 1]


def intersection_dims(fr: ThetaFrame, space: SubspaceBasis
                      ) -> tuple[int, int, int]:
    """(dim R, dim F cap R, dim F cap R cap K), all exact.

    K is the span of the E_kappa with kappa_m = 0.  R cap K stays rational,
    so the triple intersection reduces to another frame intersection.
    """
    dim_r = space.dim()
    if dim_r != space.dim_claimed:
        # replace by an honest basis before intersecting
        space = _reduce_basis(space)
    dim_fr = dim_frame_intersection(fr, space)
    rk = _intersect_with_kernel_rows(space, coordinate_kernel_rows(fr.idx))
    dim_frk = dim_frame_intersection(fr, rk)
    return dim_r, dim_fr, dim_frk


def _reduce_basis(space: SubspaceBasis) -> SubspaceBasis:
    rows = [list(col) for col in space.columns]
    rref, pivots = rref_fraction(rows)
    return SubspaceBasis(space.ambient,
                         tuple(tuple(rref[i]) for i in range(len(pivots))))


@dataclass(frozen=True)
class InequalityReport:
    m: int
    N: int
    dim_r: int
    dim_fr: int
    dim_frk: int
    lhs: int
    rhs: Fraction
    holds: bool
    strict: bool
    aux_holds: bool  # dim(F cap R cap K) >= 2 dim(F cap R) - dim R


def check_inequality(fr: ThetaFrame, space: SubspaceBasis) -> InequalityReport:
    """Evaluate the frame inequality exactly and report strictness.

    The auxiliary bound on the triple intersection is the bookkeeping used by
    the inductive proof; it is recorded per sample for cross-checking, not
    asserted.
    """
    m, N = fr.m, fr.N
    dim_r, dim_fr, dim_frk = intersection_dims(fr, space)
    rhs = (2 - Fraction(m - 1, N + m - 1)) * dim_fr
    return InequalityReport(
        m, N, dim_r, dim_fr, dim_frk,
        lhs=dim_r, rhs=rhs,
        holds=dim_r >= rhs,
        strict=dim_r > rhs,
        aux_holds=dim_frk >= 2 * dim_fr - dim_r,
    )


# ---------------------------------------------------------------------------
# Frame transformation identities
# ---------------------------------------------------------------------------

def glm_case3_map(m: int, N: int, j0: int, j1: int) -> ExactMatrix:
    """Integer matrix of E_kappa -> sum_t C(t+kappa_j1, kappa_j1)
    E_{kappa - t e_j0 + t e_j1}, t = 0..kappa_j0 (1-based j0 != j1).

    Unitriangular with respect to the kappa_{j0} grading, hence invertible
    with determinant +-1.
    """
    if j0 == j1 or not (1 <= j0 <= m) or not (1 <= j1 <= m):
        raise ValueError("need distinct j0, j1 in 1..m")
    idx = build_index(m, N)
    omega = idx.omega
    entries = [_F0] * (omega * omega)
    for ci, kappa in enumerate(idx.omega_set):
        for t in range(kappa[j0 - 1] + 1):
            target = list(kappa)
            target[j0 - 1] -= t
            target[j1 - 1] += t
            ri = idx.position(tuple(target))
            entries[ri * omega + ci] = Fraction(math.comb(t + kappa[j1 - 1],
                                                          kappa[j1 - 1]))
        # t range is finite and targets stay in Omega: |kappa| is preserved
    return ExactMatrix(omega, omega, entries)


def _frame_columns_with(idx: GradedIndex, xi: list[MPoly]) -> dict[MultiIndex, list[MPoly]]:
    """Z_kappa columns for arbitrary polynomial coordinates xi_1..xi_m."""
    m = idx.m
    nvars = xi[0].nvars
    out = {}
    for kappa in idx.theta_set:
        col = [MPoly.zero(nvars) for _ in range(idx.omega)]
        col[idx.position(kappa)] = MPoly.const(1, nvars)
        for j in range(m):
            down = _sub_e(kappa, j)
            if down is not None:
                col[idx.position(down)] = xi[j]
        out[kappa] = col
    return out


def _apply_int_map(mat: ExactMatrix, col: list[MPoly]) -> list[MPoly]:
    n = mat.rows
    nvars = col[0].nvars
    out = []
    for i in range(n):
        acc = MPoly.zero(nvars)
        for j in range(n):
            c = mat.entry(i, j)
            if c != 0 and not col[j].is_zero():
                acc = acc + col[j] * c
        out.append(acc)
    return out


def case3_frame_identity(m: int, N: int, j0: int, j1: int) -> bool:
    """Exact symbolic check of the two Case-3 identities.

    With xi'_{j0} = x_{j0} + x_{j1}, the map of :func:`glm_case3_map` must
    send Z'_kappa to sum_t C(t+kappa_j1, kappa_j1) Z_{kappa - t e_j0 + t e_j1};
    the standalone Pascal-type identity on the basis images is checked too.
    """
    idx = build_index(m, N)
    nvars = m
    xs = [MPoly.gen(j, nvars) for j in range(m)]
    xi_prime = list(xs)
    xi_prime[j0 - 1] = xs[j0 - 1] + xs[j1 - 1]
    z_prime = _frame_columns_with(idx, xi_prime)
    z_plain = _frame_columns_with(idx, xs)
    fmap = glm_case3_map(m, N, j0, j1)

    for kappa in idx.theta_set:
        lhs = _apply_int_map(fmap, z_prime[kappa])
        rhs = [MPoly.zero(nvars) for _ in range(idx.omega)]
        for t in range(kappa[j0 - 1] + 1):
            target = list(kappa)
            target[j0 - 1] -= t
            target[j1 - 1] += t
            coeff = math.comb(t + kappa[j1 - 1], kappa[j1 - 1])
            zcol = z_plain[tuple(target)]
            rhs = [r + z * coeff for r, z in zip(rhs, zcol)]
        if any(not (a - b).is_zero() for a, b in zip(lhs, rhs)):
            return False

    return _pascal_identity(idx, fmap, j0, j1)


def _pascal_identity(idx: GradedIndex, fmap: ExactMatrix, j0: int, j1: int) -> bool:
    """f(E_{kappa-e_j1}) + f(E_{kappa-e_j0}) = sum_t C(t+kappa_j1, kappa_j1)
    E_{kappa - t e_j0 + (t-1) e_j1}, with out-of-range indices read as 0."""
    omega = idx.omega
    for kappa in idx.theta_set:
        lhs = [_F0] * omega
        for j in (j1, j0):
            down = _sub_e(kappa, j - 1)
            if down is not None:
                ci = idx.position(down)
                for r in range(omega):
                    lhs[r] += fmap.entry(r, ci)
        rhs = [_F0] * omega
        for t in range(kappa[j0 - 1] + 1):
            target = list(kappa)
            target[j0 - 1] -= t
            target[j1 - 1] += t - 1
            if target[j1 - 1] < 0:
                continue
            pos = idx.position(tuple(target))
            if pos is not None:
                rhs[pos] += math.comb(t + kappa[j1 - 1], kappa[j1 - 1])
        if lhs != rhs:
            return False
    return True


def case2_scaling_identity(m: int, N: int, j0: int, lam: Fraction) -> bool:
    """Diagonal map E_kappa -> lam^{kappa_j0} E_kappa sends the frame built
    with xi'_{j0} = lam x_{j0} to lam^{kappa_j0} multiples of the Z columns."""
    if lam == 0:
        raise ValueError("lam must be nonzero")
    idx = build_index(m, N)
    xs = [MPoly.gen(j, m) for j in range(m)]
    xi_prime = list(xs)
    xi_prime[j0 - 1] = xs[j0 - 1] * lam
    z_prime = _frame_columns_with(idx, xi_prime)
    z_plain = _frame_columns_with(idx, xs)
    for kappa in idx.theta_set:
        scaled = [MPoly.zero(m) for _ in range(idx.omega)]
        for ri, mu in enumerate(idx.omega_set):
            scaled[ri] = z_prime[kappa][ri] * lam ** mu[j0 - 1]
        expect = [z * lam ** kappa[j0 - 1] for z in z_plain[kappa]]
        if any(not (a - b).is_zero() for a, b in zip(scaled, expect)):
            return False
    return True


def permutation_equivariance(m: int, N: int, perm: Sequence[int]) -> bool:
    """Relabeling coordinates permutes Omega and maps frame to relabeled frame."""
    if sorted(perm) != list(range(m)):
        raise ValueError("perm must be a permutation of 0..m-1")
    idx = build_index(m, N)

    def apply(kappa: MultiIndex) -> MultiIndex:
        out = [0] * m
        for i, v in enumerate(kappa):
            out[perm[i]] = v
        return tuple(out)

    xs = [MPoly.gen(j, m) for j in range(m)]
    xi_prime = [xs[perm[j]] for j in range(m)]
    z_prime = _frame_columns_with(idx, xi_prime)
    z_plain = _frame_columns_with(idx, xs)
    for kappa in idx.theta_set:
        moved = [None] * idx.omega
        for ri, mu in enumerate(idx.omega_set):
            moved[idx.position(apply(mu))] = z_prime[kappa][ri]
        expect = z_plain[apply(kappa)]
        if any(not (a - b).is_zero() for a, b in zip(moved, expect)):
            return False
    return True


# ---------------------------------------------------------------------------
# Projection split
# ---------------------------------------------------------------------------

def projection_matrix(idx: GradedIndex, idx_lower: GradedIndex) -> ExactMatrix:
    """pi(E_kappa) = E_{kappa - e_m} from grade (m, N) to grade (m, N-1)."""
    m = idx.m
    entries = [_F0] * (idx_lower.omega * idx.omega)
    for ci, kappa in enumerate(idx.omega_set):
        down = _sub_e(kappa, m - 1)
        if down is None:
            continue
        ri = idx_lower.position(down)
        if ri is not None:
            entries[ri * idx.omega + ci] = _F1
    return ExactMatrix(idx_lower.omega, idx.omega, entries)


def projection_split_check(m: int, N: int, space: SubspaceBasis) -> bool:
    """Exact rank-nullity split dim R = dim(R cap K) + dim pi(R), and
    pi(frame(m, N)) = frame(m, N-1) as column spans over Q(x)."""
    if N < 2:
        raise ValueError("need N >= 2 for the nontrivial branch")
    idx = build_index(m, N)
    idx_lower = build_index(m, N - 1)
    pi = projection_matrix(idx, idx_lower)

    dim_r = space.dim()
    rk = _intersect_with_kernel_rows(space, coordinate_kernel_rows(idx))
    dim_rk = rk.dim()
    projected = []
    for col in space.columns:
        projected.append(tuple(
            sum((pi.entry(r, c) * col[c] for c in range(idx.omega)), _F0)
            for r in range(idx_lower.omega)))
    dim_pr = SubspaceBasis(idx_lower.omega, tuple(projected)).dim() if projected else 0
    if dim_r != dim_rk + dim_pr:
        return False

    # pi(F) = F-bar: constructive containment both ways, plus the rank test
    fr, fr_low = frame(m, N), frame(m, N - 1)
    zcols = {k: c for k, c in zip(fr.idx.theta_set, fr.columns())}
    zbar = {k: c for k, c in zip(fr_low.idx.theta_set, fr_low.columns())}
    pi_cols = []
    for kappa in fr.idx.theta_set:
        col = zcols[kappa]
        out = []
        for r in range(idx_lower.omega):
            acc = MPoly.zero(m)
            for c in range(idx.omega):
                if pi.entry(r, c) != 0:
                    acc = acc + col[c]
            out.append(acc)
        pi_cols.append(out)
        down = _sub_e(kappa, m - 1)
        expect = zbar[down] if down is not None else [MPoly.zero(m)] * idx_lower.omega
        if any(not (a - b).is_zero() for a, b in zip(out, expect)):
            return False
    # mutual containment as a rank statement over the function field
    stacked = [[pi_cols[c][r] for c in range(len(pi_cols))]
               + [zbar[k][r] for k in fr_low.idx.theta_set]
               for r in range(idx_lower.omega)]
    rank_stacked = rank_bareiss_poly(stacked)
    rank_bar = rank_bareiss_poly([[zbar[k][r] for k in fr_low.idx.theta_set]
                                  for r in range(idx_lower.omega)])
    rank_pi = rank_bareiss_poly([[pi_cols[c][r] for c in range(len(pi_cols))]
                                 for r in range(idx_lower.omega)])
    return rank_stacked == rank_bar == rank_pi


# ---------------------------------------------------------------------------
# Sweep
# ---------------------------------------------------------------------------

def sweep_records(m: int, N: int, samples_per_dim: int, seed: int,
                  bound: int = 10, dims: Sequence[int] | None = None):
    """Random-subspace sweep; yields one JSON-ready record per sample.

    Per-sample seeds are derived deterministically from (seed, m, N, dim, i)
    and logged in the record, so any sample can be reproduced alone.
    """
    fr = frame(m, N)
    omega = fr.idx.omega
    dim_range = dims if dims is not None else range(1, omega)
    for dim in dim_range:
        for i in range(samples_per_dim):
            sample_seed = _derive_seed(seed, m, N, dim, i)
            rng = random.Random(sample_seed)
            space = random_subspace(rng, omega, dim, bound)
            rep = check_inequality(fr, space)
            yield {
                "m": m, "N": N,
                "dimR": rep.dim_r, "dimFR": rep.dim_fr, "dimFRK": rep.dim_frk,
                "lhs": rep.lhs, "rhs": str(rep.rhs),
                "holds": rep.holds, "strict": rep.strict,
                "aux": rep.aux_holds, "seed": sample_seed,
            }


def _derive_seed(seed: int, m: int, N: int, dim: int, i: int) -> int:
    h = seed & 0xFFFFFFFF
    for v in (m, N, dim, i):
        h = (h * 1000003 ^ (v + 0x9E3779B9)) & 0xFFFFFFFFFFFFFFFF
    return h
