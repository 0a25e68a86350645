"""Structured reports: JSON documents plus a plain-text rendering.

Every document has the shape ``{"schema", "kind", "verdict", "data"}`` with
expressions stored as printed strings, so identical inputs give
byte-identical JSON.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..canonical import CanonicalCheck, PointTransformation
from ..liegeom import AlgebraReport, SymmetryCertificate, VectorField
from ..monge_ampere import ConditionSet
from ..pdesystem import PDESystem
from ..transform import ClassificationReport, ReductionResult

SCHEMA_ID = "quasireduce.report/1"
SCHEMA_PATH = Path(__file__).resolve().parent.parent / "data" / "schemas" / "report.schema.json"
VERDICTS = ("ok", "negative", "error")


def _s(e) -> str:
    return str(e)


def _field(X: VectorField) -> dict:
    return {"name": X.name or "", "xi": [_s(c) for c in X.xi], "eta": [_s(c) for c in X.eta]}


def _system(S: PDESystem) -> dict:
    sig = S.signature
    out = {
        "name": S.name or "",
        "signature": {"n": sig.n, "m": sig.m, "independent": sig.x, "dependent": sig.u},
        "equations": [_s(e) for e in S.equations],
    }
    cleared = S.metadata.get("cleared_factors")
    if cleared is not None:
        out["cleared_factors"] = [_s(c) for c in cleared]
    if "method" in S.metadata:
        out["method"] = S.metadata["method"]
    return out


def _transformation(t: PointTransformation) -> dict:
    out = {
        "target": {"independent": t.target.x, "dependent": t.target.u},
        "z": [_s(e) for e in t.Z],
        "w": [_s(e) for e in t.W],
    }
    if t.inverse is not None:
        out["inverse_x"] = [_s(e) for e in t.inverse[0]]
        out["inverse_u"] = [_s(e) for e in t.inverse[1]]
    return out


def _algebra(r: AlgebraReport) -> dict:
    table = []
    for (i, j), v in sorted(r.table.items()):
        table.append({"i": i + 1, "j": j + 1, "coefficients": None if v is None else [_s(c) for c in v]})
    certs = [{"check": c["check"], "ok": bool(c["ok"]), "residual": list(c["residual"])} for c in r.certificates]
    return {
        "structure_ok": bool(r.structure_ok),
        "distribution_rank": int(r.distribution_rank),
        "table": table,
        "certificates": certs,
        "failures": list(r.failures),
    }


def _certificate(c: SymmetryCertificate) -> dict:
    return {
        "holds": bool(c.holds),
        "verified": bool(c.verified),
        "mult_degree": int(c.mult_degree),
        "nonlinear_indices": [int(i) for i in c.nonlinear_indices],
        "multipliers": [{str(l): _s(v) for l, v in sorted(m.items())} for m in c.multipliers],
        "linear_multipliers": [[_s(v) for v in ms] for ms in c.linear_multipliers],
        "residuals": [_s(r) for r in c.residuals],
    }


def _classification(c: ClassificationReport) -> dict:
    out = {
        "autonomous": bool(c.autonomous),
        "jet_degree": [int(d) for d in c.jet_degree],
        "homogeneous_in_jets": [bool(b) for b in c.homogeneous_in_jets],
        "quasilinear": bool(c.quasilinear),
    }
    if c.matrices is not None:
        out["matrices"] = [[[_s(v) for v in row] for row in A] for A in c.matrices]
    if c.residual_source is not None:
        out["residual_source"] = [_s(v) for v in c.residual_source]
    return out


def _canonical(c: CanonicalCheck) -> dict:
    return {"families": {k: bool(v) for k, v in sorted(c.families.items())}, "witnesses": {k: list(v) for k, v in sorted(c.witnesses.items())}}


def document(kind: str, verdict: str, data: dict) -> dict:
    if verdict not in VERDICTS:
        raise ValueError(f"unknown verdict {verdict!r}")
    return {"schema": SCHEMA_ID, "kind": kind, "verdict": verdict, "data": data}


def algebra_report(r: AlgebraReport) -> dict:
    return document("algebra", "ok" if r.structure_ok else "negative", _algebra(r))


def bracket_report(F: VectorField, G: VectorField, B: VectorField) -> dict:
    return document("bracket", "ok", {"left": _field(F), "right": _field(G), "bracket": _field(B)})


def symmetry_report(system: PDESystem, X: VectorField, c: SymmetryCertificate) -> dict:
    return document("symmetry", "ok" if c.holds else "negative", {"system": _system(system), "field": _field(X), "certificate": _certificate(c)})


def canonical_report(t: PointTransformation, check: CanonicalCheck) -> dict:
    return document("canonical", "ok" if check.ok else "negative", {"transformation": _transformation(t), "check": _canonical(check)})


def classification_report(system: PDESystem, c: ClassificationReport) -> dict:
    return document("classification", "ok", {"system": _system(system), "classification": _classification(c)})


def system_report(system: PDESystem, kind: str = "system") -> dict:
    return document(kind, "ok", {"system": _system(system)})


def conditions_report(dimension: str, conditions: list, extra: dict | None = None) -> dict:
    data = {"dimension": dimension, "count": len(conditions), "conditions": [_s(c) for c in conditions]}
    data.update(extra or {})
    return document("conditions", "ok", data)


def condition_set_report(dimension: str, cs: ConditionSet, conditions: list) -> dict:
    return conditions_report(dimension, conditions, {"solved": {str(k): _s(v) for k, v in sorted(cs.solved.items())}, "mult_degree": int(cs.mult_degree)})


def reduction_report(r: ReductionResult) -> dict:
    data: dict = {"stage": r.stage, "message": r.message}
    if r.algebra is not None:
        data["algebra"] = _algebra(r.algebra)
    data["symmetry"] = [_certificate(c) for c in r.symmetry]
    if r.transformation is not None:
        data["transformation"] = _transformation(r.transformation)
    if r.system is not None:
        data["system"] = _system(r.system)
    if r.classification is not None:
        data["classification"] = _classification(r.classification)
    return document("reduction", "ok" if r.ok else "negative", data)


def error_report(message: str, kind: str = "error") -> dict:
    return document(kind, "error", {"message": message})


def render_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def parse_report(text: str) -> dict:
    doc = json.loads(text)
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA_ID:
        raise ValueError("not a quasireduce report")
    for key in ("kind", "verdict", "data"):
        if key not in doc:
            raise ValueError(f"report lacks {key!r}")
    return doc


def load_schema() -> dict:
    return json.loads(SCHEMA_PATH.read_text(encoding="utf-8"))


def render_text(doc: dict) -> str:
    lines = [f"{doc['kind']}: {doc['verdict']}"]
    _text(doc["data"], lines, "  ")
    return "\n".join(lines) + "\n"


def _text(v, lines: list, indent: str) -> None:
    if isinstance(v, dict):
        for k in sorted(v):
            x = v[k]
            if isinstance(x, (dict, list)) and x:
                lines.append(f"{indent}{k}:")
                _text(x, lines, indent + "  ")
            else:
                lines.append(f"{indent}{k}: {_scalar(x)}")
    elif isinstance(v, list):
        for k, x in enumerate(v, 1):
            if isinstance(x, (dict, list)) and x:
                lines.append(f"{indent}[{k}]")
                _text(x, lines, indent + "  ")
            else:
                lines.append(f"{indent}[{k}] {_scalar(x)}")
    else:
        lines.append(f"{indent}{_scalar(v)}")


def _scalar(x) -> str:
    if isinstance(x, bool):
        return "yes" if x else "no"
    if x == [] or x == {}:
        return "none"
    return str(x)
