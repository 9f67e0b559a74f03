"""Diophantine payoff: integer approximant pairs and their quality.

From a full-rank certificate pick the two smallest iteration indices k1, k2
whose evaluation rows at the distinguished indices (N,0,..,0), (N-1,0,..,0)
have a nonzero 2x2 minor, and form

    p_j = -(M + t k_j)! P^[k_j]_{(N,0,..,0)}(1)
    q_j =  (M + t k_j)! P^[k_j]_{(N-1,0,..,0)}(1)

Both are exact integers because the bracket coefficients live in the
z^nu/nu! basis with nu < M + t k_j; this is asserted, never rounded.  The
defect |q f1(1) - p| is then measured with ball arithmetic at a precision
scaled to resolve magnitudes of order M^-K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .balls import BallValue, log2_fraction
from .errors import IntegralityViolated
from .iteration import IterTable, RankCertificate, SystemClosure
from .series import ESeries

_F0 = Fraction(0)


@dataclass(frozen=True)
class ApproximantPair:
    k: int
    p: int
    q: int
    defect: BallValue  # |q f1(1) - p|

    def defect_upper(self) -> Fraction:
        return self.defect.upper()


def default_defect_precision(M: int, K: int) -> int:
    """Enough bits to resolve defects of order M^-K, with headroom."""
    return 4 * K * max(1, math.ceil(math.log2(max(2, M)))) + 256


def _integer_value(value: Fraction, factor: int) -> int:
    scaled = value * factor
    if scaled.denominator != 1:
        raise IntegralityViolated(f"{factor} * {value} is not an integer")
    return int(scaled)


def extract_pairs(cert: RankCertificate, table: IterTable, closure: SystemClosure,
                  f1_at_1: BallValue) -> tuple[ApproximantPair, ApproximantPair]:
    """Build the two pairs from the certificate's (k1, k2).

    Pairs are sign-normalized to q > 0 when q is nonzero; the 2x2 integer
    determinant is checked nonzero, which is what makes one of the pairs
    non-collinear with any external candidate.
    """
    if cert.pair is None:
        raise ValueError("certificate carries no (k1, k2) witness")
    idx = table.closure.idx
    top = idx.position(idx.top_index)
    second = idx.position(idx.second_index)
    M, t = table.source.params.M, closure.t
    out = []
    for k in cert.pair:
        factor = math.factorial(M + t * k)
        p = -_integer_value(cert.evaluation[top][k - 1], factor)
        q = _integer_value(cert.evaluation[second][k - 1], factor)
        if q < 0:
            p, q = -p, -q
        defect = abs(f1_at_1 * q - p)
        out.append(ApproximantPair(k, p, q, defect))
    p1, p2 = out
    det = p1.p * p2.q - p2.p * p1.q
    if det == 0:
        raise IntegralityViolated("collinear approximant pairs; upstream rank bug")
    return p1, p2


def best_pair(pairs: Sequence[ApproximantPair]) -> ApproximantPair:
    """The pair with the smaller certified |f(1) - p/q| (ties keep order)."""
    def key(pair: ApproximantPair) -> Fraction:
        if pair.q == 0:
            return Fraction(10) ** 12
        return pair.defect_upper() / abs(pair.q)
    return min(pairs, key=key)


@dataclass(frozen=True)
class ProfileRow:
    M: int
    K: int
    k: int
    q: int
    log2_q: float
    log2_defect: float        # linear form |q f(1) - p|
    ratio: Optional[float]    # log|f(1) - p/q| / log q
    exact_zero: bool


def profile_row(M: int, K: int, pair: ApproximantPair) -> ProfileRow:
    """One smallness measurement.

    ``ratio`` uses the measure-style normalization log|f(1)-p/q| / log q,
    whose desk-scale trend target is -(1 + N/(N+m-1)); the raw linear-form
    defect is reported alongside.  Upper ball bounds are used throughout, so
    a passing ratio is a certified statement.
    """
    du = pair.defect_upper()
    if pair.defect.contains_zero():
        # possibly exactly rational; flagged and excluded from fits
        return ProfileRow(M, K, pair.k, pair.q, log2_fraction(Fraction(abs(pair.q))),
                          float("-inf"), None, True)
    lq = log2_fraction(Fraction(abs(pair.q)))
    ld = log2_fraction(du)
    ratio = (ld - lq) / lq if lq > 1 else None
    return ProfileRow(M, K, pair.k, pair.q, lq, ld, ratio, False)


def smallness_profile(rows: Sequence[ProfileRow]) -> list[dict]:
    """Plot-ready records of (M, log q, log defect, ratio)."""
    out = []
    for r in rows:
        out.append({
            "M": r.M, "K": r.K, "k": r.k,
            "log2_q": round(r.log2_q, 3),
            "log2_defect": None if r.exact_zero else round(r.log2_defect, 3),
            "ratio": None if r.ratio is None else round(r.ratio, 4),
            "exact_zero": r.exact_zero,
        })
    return out


def measure_external(p: int, q: int, pairs: Sequence[ApproximantPair]
                     ) -> Fraction | None:
    """Certified lower bound for |f(1) - p/q| from the non-collinear pair.

    Uses |q_j| |q f(1) - p| >= 1 - q |q_j f(1) - p_j| when the right side is
    positive; returns None when neither pair gives a positive bound at this
    scale (the caller should rerun at larger M).
    """
    if q <= 0:
        raise ValueError("q must be a positive integer")
    best: Fraction | None = None
    for pair in pairs:
        if p * pair.q - pair.p * q == 0:
            continue  # collinear with this pair; the other one cannot be
        loss = q * pair.defect_upper()
        if loss >= 1:
            continue
        bound = (1 - loss) / abs(pair.q) / q
        if best is None or bound > best:
            best = bound
    return best


# ---------------------------------------------------------------------------
# Continued fractions from a ball
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentEstimate:
    quotients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    samples: tuple[tuple[int, float], ...]  # (q_n, mu_n from upper defect)
    exponent: Optional[float]               # tail median of mu_n
    exponent_max: Optional[float]
    method: str
    terminated_rational: bool
    certified_depth: int


def continued_fraction_exponent(value: BallValue, depth: int) -> ExponentEstimate:
    """Partial quotients, convergents, and a pointwise exponent fit.

    Every quotient is certified: the ball of the current tail must not
    straddle an integer, else extraction stops early with the depth reached.
    mu_n = -log|value - p_n/q_n| / log q_n uses the certified upper defect;
    the estimate is the median over the last half of the samples (robust to
    the irregular early convergents).
    """
    x = value
    quotients: list[int] = []
    terminated = False
    for _ in range(depth):
        if x.is_exact() and x.mid.denominator == 1:
            quotients.append(int(x.mid))
            terminated = True
            break
        a = x.floor_certified()
        if a is None:
            break
        quotients.append(a)
        frac = x - a
        if frac.is_exact() and frac.mid == 0:
            terminated = True
            break
        if not frac.excludes_zero():
            break
        x = frac.reciprocal()

    convergents: list[tuple[int, int]] = []
    p0, q0, p1, q1 = 1, 0, 0, 1  # p_{-1}/q_{-1}, p_0/q_0 seeds
    for a in quotients:
        p0, q0, p1, q1 = a * p0 + p1, a * q0 + q1, p0, q0
        convergents.append((p0, q0))

    samples: list[tuple[int, float]] = []
    for (pn, qn) in convergents:
        if qn <= 1:
            continue
        err = abs(value - Fraction(pn, qn))
        if not err.excludes_zero():
            continue
        mu = -log2_fraction(err.upper()) / math.log2(qn)
        samples.append((qn, mu))
    exponent = exponent_max = None
    if samples:
        tail = [mu for _, mu in samples[len(samples) // 2:]]
        tail.sort()
        exponent = tail[len(tail) // 2]
        exponent_max = max(mu for _, mu in samples)
    return ExponentEstimate(tuple(quotients), tuple(convergents), tuple(samples),
                            exponent, exponent_max,
                            method="continued-fraction",
                            terminated_rational=terminated,
                            certified_depth=len(quotients))
