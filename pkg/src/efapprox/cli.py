"""Command-line front end.

One subcommand per pipeline stage: eval, pade, iterate, rank, approx,
thrat-sweep, report.  Exit codes: 0 success, 2 validation failure, 3 rank
certificate deficiency, 4 internal assertion.  EFAPPROX_OUT_DIR sets the
default output directory.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction

from .approx import continued_fraction_exponent, profile_row, smallness_profile
from .balls import log2_fraction
from .errors import EfapproxError, IntegralityViolated, SystemValidationError
from .frames import sweep_records
from .pade import build_index, construct, make_params, verify_vanishing
from .pipeline import run_pipeline
from .systems import (SystemDocument, bundled_document, bundled_names,
                      pade_to_json, pairs_to_json, parse_system, rat_from_str,
                      rat_to_str)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DEFICIENT = 3
EXIT_INTERNAL = 4


def _load_document(spec: str) -> SystemDocument:
    if os.path.exists(spec):
        return parse_system(spec)
    if spec.endswith(".json"):
        base = os.path.basename(spec)[:-5]
    else:
        base = spec
    if base in bundled_names():
        return bundled_document(base)
    raise SystemValidationError(
        f"no such file, and no bundled system named {base!r} "
        f"(bundled: {', '.join(bundled_names())})", path=spec)


def _out_path(args, default_name: str) -> str | None:
    if args.out:
        return args.out
    out_dir = os.environ.get("EFAPPROX_OUT_DIR")
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        return os.path.join(out_dir, default_name)
    return None


def _emit(payload, args, default_name: str) -> None:
    path = _out_path(args, default_name)
    text = json.dumps(payload, indent=1)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        print(f"wrote {path}")
    else:
        print(text)


def cmd_eval(args) -> int:
    doc = _load_document(args.system)
    series = doc.series_list()
    i = args.series_index
    if not 0 <= i < len(series):
        raise SystemValidationError(f"series index {i} out of range", path=doc.path)
    point = rat_from_str(args.point if args.point is not None
                         else doc.metadata.get("eval_point", "1"))
    ball = series[i].eval_ball(point, args.precision_bits)
    payload = {
        "system": doc.name, "series": doc.labels[i], "point": rat_to_str(point),
        "precision_bits": args.precision_bits,
        "midpoint": rat_to_str(ball.mid), "radius": rat_to_str(ball.rad),
        "midpoint_float": ball.midpoint_float(),
        "log2_radius": None if ball.rad == 0 else round(log2_fraction(ball.rad), 2),
    }
    expected = doc.metadata.get("expected_value")
    meta_point = doc.metadata.get("eval_point")
    if expected is not None and meta_point is not None \
            and point == rat_from_str(meta_point):
        payload["expected_value"] = expected
        payload["contains_expected"] = ball.contains(rat_from_str(expected))
    _emit(payload, args, f"eval_{doc.name}.json")
    return EXIT_OK


def cmd_pade(args) -> int:
    doc = _load_document(args.system)
    sysd = doc.diff_system()
    series = doc.series_list()
    idx = build_index(sysd.m, args.N)
    params = make_params(idx, args.M, rat_from_str(args.eta, "--eta"))
    g = construct(sysd, series, idx, params)
    orders = verify_vanishing(g, series)
    payload = pade_to_json(g)
    payload["vanishing_orders"] = {",".join(map(str, k)): v
                                   for k, v in orders.items()}
    payload["max_abs_pi_bits"] = g.max_abs_pi.bit_length()
    _emit(payload, args, f"pade_{doc.name}_N{args.N}_M{args.M}.json")
    bad = {k: v for k, v in orders.items() if v is not None and v < params.K}
    if bad:
        print(f"vanishing deficiency: {bad}", file=sys.stderr)
        return EXIT_INTERNAL
    print(f"K={params.K}; all {idx.theta} remainders vanish to order >= K")
    return EXIT_OK


def _run(args, doc: SystemDocument):
    sysd = doc.diff_system()
    series = doc.series_list()
    return run_pipeline(sysd, series, args.N, args.M,
                        rat_from_str(args.eta, "--eta"),
                        precision_bits=args.precision_bits)


def cmd_iterate(args) -> int:
    doc = _load_document(args.system)
    run = _run(args, doc)
    k_show = args.kmax or run.table.k_max
    payload = {
        "system": doc.name, "N": args.N, "M": args.M, "eta": args.eta,
        "K": run.params.K, "t": run.closure.t,
        "tau": run.closure.tau, "T_exponent": run.closure.i_exp,
        "k_max": run.table.k_max,
        "bracket_at_one": [[rat_to_str(v) for v in row[:k_show]]
                           for row in run.cert.evaluation],
    }
    _emit(payload, args, f"iterate_{doc.name}_N{args.N}_M{args.M}.json")
    return EXIT_OK


def cmd_rank(args) -> int:
    doc = _load_document(args.system)
    run = _run(args, doc)
    cert = run.cert
    payload = {
        "system": doc.name, "N": args.N, "M": args.M,
        "omega": run.idx.omega, "rank": cert.rank,
        "witness_columns": list(cert.witness_columns),
        "pair": list(cert.pair) if cert.pair else None,
        "prefix_identity": cert.prefix_identity,
        "k_max": cert.k_max,
    }
    _emit(payload, args, f"rank_{doc.name}_N{args.N}_M{args.M}.json")
    if not cert.full or cert.pair is None:
        print(f"rank {cert.rank} < omega {run.idx.omega} at k_max {cert.k_max}",
              file=sys.stderr)
        return EXIT_DEFICIENT
    print(f"rank {cert.rank} = omega; (k1,k2) = {cert.pair}")
    return EXIT_OK


def cmd_approx(args) -> int:
    doc = _load_document(args.system)
    run = _run(args, doc)
    if run.pairs is None:
        print("rank certificate deficient; no pairs extracted", file=sys.stderr)
        return EXIT_DEFICIENT
    payload = pairs_to_json(run.pairs, run)
    rows = [profile_row(run.params.M, run.params.K, p) for p in run.pairs]
    payload["profile"] = smallness_profile(rows)
    _emit(payload, args, f"approx_{doc.name}_M{args.M}.json")
    best = min(rows, key=lambda r: r.ratio if r.ratio is not None else 0.0)
    print(f"pairs k={tuple(p.k for p in run.pairs)}; best ratio "
          f"{best.ratio if best.ratio is not None else 'n/a'}")
    return EXIT_OK


def cmd_thrat_sweep(args) -> int:
    path = _out_path(args, f"sweep_m{args.m}_N{args.N}.jsonl")
    records = sweep_records(args.m, args.N, args.samples, args.seed,
                            bound=args.bound)
    violations = 0
    count = 0
    lines = []
    for rec in records:
        count += 1
        if not rec["holds"] or not rec["strict"]:
            violations += 1
        lines.append(json.dumps(rec))
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {count} records to {path}")
    else:
        print(text, end="")
    print(f"violations: {violations} of {count}")
    return EXIT_OK if violations == 0 else EXIT_INTERNAL


def cmd_report(args) -> int:
    rows = []
    for path in args.inputs:
        with open(path, "r", encoding="utf-8") as fh:
            if path.endswith(".jsonl"):
                for line in fh:
                    if line.strip():
                        rows.append(json.loads(line))
            else:
                doc = json.load(fh)
                if "profile" in doc:
                    rows.extend(doc["profile"])
                else:
                    rows.append(doc)
    if not rows:
        print("nothing to report", file=sys.stderr)
        return EXIT_VALIDATION
    keys: list[str] = []
    for row in rows:
        for k in row:
            if k not in keys:
                keys.append(k)
    out = args.out or "report.csv"
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=keys)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k) for k in keys})
    print(f"wrote {len(rows)} rows to {out}")
    if args.plot:
        _plot(rows, out.rsplit(".", 1)[0] + ".png")
    return EXIT_OK


def _plot(rows, path) -> None:
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:  # pragma: no cover - matplotlib is normally present
        print("matplotlib unavailable; skipping plot", file=sys.stderr)
        return
    xs = [r.get("M") for r in rows if r.get("ratio") is not None]
    ys = [r["ratio"] for r in rows if r.get("ratio") is not None]
    if not xs:
        return
    fig, ax = plt.subplots()
    ax.plot(xs, ys, "o-")
    ax.set_xlabel("M")
    ax.set_ylabel("log|f(1)-p/q| / log q")
    fig.savefig(path, dpi=120)
    print(f"wrote {path}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="efapprox",
        description="Exact graded Pade approximation and Diophantine "
                    "measurements for E-function values.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, system=True):
        if system:
            p.add_argument("--system", required=True,
                           help="path to a system document, or a bundled name")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--precision-bits", type=int, default=256)
        p.add_argument("--out", help="output file (default: stdout or EFAPPROX_OUT_DIR)")

    p = sub.add_parser("eval", help="rigorous ball evaluation of a series")
    common(p)
    p.add_argument("--series-index", type=int, default=0)
    p.add_argument("--point", help="rational evaluation point (default: metadata or 1)")
    p.set_defaults(func=cmd_eval)

    for name, func, needs_kmax in (("pade", cmd_pade, False),
                                   ("iterate", cmd_iterate, True),
                                   ("rank", cmd_rank, True),
                                   ("approx", cmd_approx, True)):
        p = sub.add_parser(name)
        common(p)
        p.add_argument("--N", type=int, required=True)
        p.add_argument("--M", type=int, required=True)
        p.add_argument("--eta", required=True, help="rational, e.g. 1/8")
        if needs_kmax:
            p.add_argument("--kmax", type=int, default=None)
        p.set_defaults(func=func)

    p = sub.add_parser("thrat-sweep", help="random-subspace nondegeneracy sweep")
    common(p, system=False)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--bound", type=int, default=10)
    p.set_defaults(func=cmd_thrat_sweep)

    p = sub.add_parser("report", help="aggregate JSON artifacts into CSV")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out")
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (AssertionError, IntegralityViolated) as exc:
        print(f"internal assertion: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except EfapproxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
