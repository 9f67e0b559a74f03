"""System documents: JSON schema, validation, serialization, bundled corpus.

Rationals are serialized as decimal-free "p/q" strings and Laurent
polynomials as {"low": e, "coeffs": [...]}, so every artifact round-trips
bit-exactly.  A document carries the series definitions and optionally the
first-order system; eval-only corpus entries (rational 1F1 values, the Apery
generating function) have no system block.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Any, Optional, Sequence

from .diffsys import DiffSystem
from .errors import SystemValidationError
from .laurent import LaurentPoly
from .series import (CoefficientTable, ESeries, HypergeometricSpec,
                     Recurrence)

SCHEMA_SYSTEM = "efapprox/system-v1"
SCHEMA_PADE = "efapprox/pade-v1"
SCHEMA_PAIRS = "efapprox/pairs-v1"


def rat_to_str(x: Fraction | int) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def rat_from_str(s: Any, where: str = "") -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise SystemValidationError(f"expected rational string, got {s!r}",
                                    location=where)
    try:
        return Fraction(s.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise SystemValidationError(f"malformed rational {s!r}: {exc}",
                                    location=where) from None


def laurent_to_json(p: LaurentPoly) -> dict:
    return {"low": p.low, "coeffs": [rat_to_str(c) for c in p.coeffs]}


def laurent_from_json(obj: Any, where: str = "") -> LaurentPoly:
    if not isinstance(obj, dict) or "coeffs" not in obj:
        raise SystemValidationError("Laurent entry must be {low, coeffs}",
                                    location=where)
    low = obj.get("low", 0)
    if not isinstance(low, int):
        raise SystemValidationError("'low' must be an integer", location=where)
    coeffs = [rat_from_str(c, where) for c in obj["coeffs"]]
    return LaurentPoly(low, coeffs)


def _series_to_json(rule_obj: Any) -> dict:
    if isinstance(rule_obj, HypergeometricSpec):
        return {"type": "hypergeometric",
                "upper": [rat_to_str(a) for a in rule_obj.upper],
                "lower": [rat_to_str(b) for b in rule_obj.lower],
                "scale": rat_to_str(rule_obj.argument_scale),
                "power": rule_obj.argument_power}
    if isinstance(rule_obj, Recurrence):
        return {"type": "recurrence",
                "coeffs": [[rat_to_str(c) for c in poly] for poly in rule_obj.coeffs],
                "initial": [rat_to_str(v) for v in rule_obj.initial]}
    if isinstance(rule_obj, CoefficientTable):
        return {"type": "table",
                "values": [rat_to_str(v) for v in rule_obj.values],
                "polynomial": rule_obj.polynomial}
    raise TypeError(f"unknown rule {type(rule_obj)!r}")


def _series_from_json(obj: Any, where: str) -> dict:
    if not isinstance(obj, dict) or "type" not in obj:
        raise SystemValidationError("series spec must carry a 'type'", location=where)
    kind = obj["type"]
    if kind == "hypergeometric":
        lower = [rat_from_str(b, where) for b in obj.get("lower", [])]
        for b in lower:
            if b.denominator == 1 and b <= 0:
                raise SystemValidationError(
                    f"lower parameter {rat_to_str(b)} is a nonpositive integer",
                    location=where)
        spec = HypergeometricSpec(
            tuple(rat_from_str(a, where) for a in obj.get("upper", [])),
            tuple(lower),
            rat_from_str(obj.get("scale", "1"), where),
            int(obj.get("power", 1)))
        return {"rule": spec, "derivative_of": None}
    if kind == "recurrence":
        rec = Recurrence(
            tuple(tuple(rat_from_str(c, where) for c in poly)
                  for poly in obj["coeffs"]),
            tuple(rat_from_str(v, where) for v in obj["initial"]))
        return {"rule": rec, "derivative_of": None}
    if kind == "table":
        table = CoefficientTable(
            tuple(rat_from_str(v, where) for v in obj["values"]),
            bool(obj.get("polynomial", False)))
        return {"rule": table, "derivative_of": None}
    if kind == "derivative":
        return {"rule": None, "derivative_of": int(obj["of"])}
    raise SystemValidationError(f"unknown series type {kind!r}", location=where)


@dataclass
class SystemDocument:
    """Parsed and validated system description."""

    name: str
    m: int
    series_specs: list[dict]
    system_rows: Optional[list[list[LaurentPoly]]]
    labels: list[str]
    metadata: dict = field(default_factory=dict)
    path: Optional[str] = None

    def series_list(self) -> list[ESeries]:
        hints = self.metadata.get("growth_hints")
        out: list[ESeries] = []
        for i, spec in enumerate(self.series_specs):
            hint = rat_from_str(hints[i]) if hints and hints[i] is not None else None
            if spec["derivative_of"] is not None:
                base = out[spec["derivative_of"]]
                out.append(base.derivative())
            else:
                out.append(ESeries(spec["rule"], hint,
                                   name=self.labels[i] if i < len(self.labels) else ""))
        return out

    def diff_system(self) -> DiffSystem:
        if self.system_rows is None:
            raise SystemValidationError(
                "document has no differential system block", path=self.path)
        return DiffSystem.make(self.system_rows, self.labels)

    @property
    def has_system(self) -> bool:
        return self.system_rows is not None

    def to_json(self) -> dict:
        doc = {
            "schema": SCHEMA_SYSTEM,
            "name": self.name,
            "m": self.m,
            "labels": self.labels,
            "series": [
                ({"type": "derivative", "of": s["derivative_of"]}
                 if s["derivative_of"] is not None else _series_to_json(s["rule"]))
                for s in self.series_specs],
            "system": None if self.system_rows is None else
                [[laurent_to_json(e) for e in row] for row in self.system_rows],
            "metadata": self.metadata,
        }
        return doc


def parse_system_json(doc: Any, path: str | None = None) -> SystemDocument:
    if not isinstance(doc, dict):
        raise SystemValidationError("document root must be an object", path=path)
    schema = doc.get("schema")
    if schema != SCHEMA_SYSTEM:
        raise SystemValidationError(
            f"unsupported schema {schema!r} (expected {SCHEMA_SYSTEM})", path=path)
    name = doc.get("name", "unnamed")
    m = doc.get("m")
    if not isinstance(m, int) or m < 1:
        raise SystemValidationError("'m' must be a positive integer", path=path)
    series = doc.get("series")
    if not isinstance(series, list) or len(series) != m:
        raise SystemValidationError(f"need exactly m={m} series specs", path=path)
    specs = [_series_from_json(s, f"series[{i}]") for i, s in enumerate(series)]
    for i, s in enumerate(specs):
        ref = s["derivative_of"]
        if ref is not None and not (0 <= ref < i):
            raise SystemValidationError(
                "derivative series must reference an earlier index",
                location=f"series[{i}]", path=path)
    labels = doc.get("labels") or [f"f{i+1}" for i in range(m)]
    system_rows = None
    raw_system = doc.get("system")
    if raw_system is not None:
        if not isinstance(raw_system, list) or len(raw_system) != m:
            raise SystemValidationError("system must have m rows", path=path)
        system_rows = []
        for l, row in enumerate(raw_system):
            if not isinstance(row, list) or len(row) != m + 1:
                raise SystemValidationError(
                    f"system row {l} must have m+1 entries", path=path)
            system_rows.append([laurent_from_json(e, f"system[{l}][{j}]")
                                for j, e in enumerate(row)])
    return SystemDocument(name, m, specs, system_rows, list(labels),
                          doc.get("metadata") or {}, path)


def parse_system(path: str) -> SystemDocument:
    """Load and validate a system document from a file path."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise SystemValidationError("file not found", path=path) from None
    except json.JSONDecodeError as exc:
        raise SystemValidationError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            path=path) from None
    return parse_system_json(doc, path)


def bundled_document(name: str) -> SystemDocument:
    """Load one of the packaged corpus entries by bare name (e.g. 'exp')."""
    ref = resources.files("efapprox").joinpath(f"data/{name}.json")
    try:
        text = ref.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise SystemValidationError(f"no bundled system named {name!r}") from None
    return parse_system_json(json.loads(text), f"bundled:{name}")


def bundled_names() -> list[str]:
    out = []
    for entry in resources.files("efapprox").joinpath("data").iterdir():
        if entry.name.endswith(".json"):
            out.append(entry.name[:-5])
    return sorted(out)


# ---------------------------------------------------------------------------
# Artifact serialization (round-trip exact)
# ---------------------------------------------------------------------------

def pade_to_json(g) -> dict:
    from .pade import GradedPadeSystem
    assert isinstance(g, GradedPadeSystem)
    return {
        "schema": SCHEMA_PADE,
        "m": g.index.m, "N": g.index.N,
        "M": g.params.M, "eta": rat_to_str(g.params.eta), "K": g.params.K,
        "pi": {",".join(map(str, kappa)): list(row) for kappa, row in g.pi.items()},
    }


def pade_from_json(doc: Any):
    from .pade import GradedPadeSystem, build_index, make_params
    if doc.get("schema") != SCHEMA_PADE:
        raise SystemValidationError(f"unsupported schema {doc.get('schema')!r}")
    idx = build_index(int(doc["m"]), int(doc["N"]))
    params = make_params(idx, int(doc["M"]), rat_from_str(doc["eta"]))
    if params.K != int(doc["K"]):
        raise SystemValidationError("stored K disagrees with recomputed K")
    pi = {}
    for key, row in doc["pi"].items():
        kappa = tuple(int(v) for v in key.split(","))
        if idx.position(kappa) is None:
            raise SystemValidationError(f"index {kappa} outside Omega")
        pi[kappa] = tuple(int(v) for v in row)
    return GradedPadeSystem(idx, params, pi)


def pairs_to_json(pairs, run) -> dict:
    return {
        "schema": SCHEMA_PAIRS,
        "m": run.idx.m, "N": run.idx.N, "M": run.params.M,
        "eta": rat_to_str(run.params.eta), "K": run.params.K,
        "precision_bits": run.precision_bits,
        "pairs": [{"k": p.k, "p": str(p.p), "q": str(p.q),
                   "defect_upper": rat_to_str(p.defect_upper())}
                  for p in pairs],
    }
