"""End-to-end runs: system + parameters -> approximant pairs and measurements."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .approx import (ApproximantPair, ProfileRow, best_pair,
                     default_defect_precision, extract_pairs, profile_row)
from .diffsys import DiffSystem
from .iteration import (IterTable, RankCertificate, SystemClosure, build_A,
                        rank_certificate_auto)
from .pade import (GradedIndex, GradedPadeSystem, PadeParams, build_index,
                   construct, make_params, verify_vanishing)
from .series import ESeries


@dataclass(frozen=True)
class PipelineRun:
    idx: GradedIndex
    params: PadeParams
    pade: GradedPadeSystem
    closure: SystemClosure
    table: IterTable
    cert: RankCertificate
    pairs: tuple[ApproximantPair, ApproximantPair] | None
    vanishing: dict
    precision_bits: int

    @property
    def deficient(self) -> bool:
        return not cert_full(self.cert)

    def profile(self) -> ProfileRow:
        if self.pairs is None:
            raise ValueError("no pairs on a deficient run")
        return profile_row(self.params.M, self.params.K, best_pair(self.pairs))


def cert_full(cert: RankCertificate) -> bool:
    return cert.full and cert.pair is not None


def run_pipeline(sys: DiffSystem, series: Sequence[ESeries], N: int, M: int,
                 eta, precision_bits: int | None = None) -> PipelineRun:
    """construct -> verify -> iterate -> rank certificate -> pairs.

    On rank deficiency the run is returned with pairs = None so the caller
    can decide between raising the budget and reporting exit code 3.
    """
    idx = build_index(sys.m, N)
    params = make_params(idx, M, Fraction(eta))
    pade = construct(sys, series, idx, params)
    vanishing = verify_vanishing(pade, series)
    for kappa, order in vanishing.items():
        if order is not None and order < params.K:
            raise AssertionError(f"vanishing order {order} < K at {kappa}")
    closure = build_A(sys, idx)
    cert, table = rank_certificate_auto(closure, pade)
    prec = precision_bits or default_defect_precision(M, params.K)
    pairs = None
    if cert_full(cert):
        f1_at_1 = series[0].eval_ball(1, prec)
        pairs = extract_pairs(cert, table, closure, f1_at_1)
    return PipelineRun(idx, params, pade, closure, table, cert, pairs,
                       vanishing, prec)
