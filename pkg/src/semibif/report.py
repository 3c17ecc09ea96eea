"""Analysis report assembly and deterministic JSON emission.

The JSON schema (top-level keys, in order): input, landmarks, conditions,
endpoints, classification, warnings, files.  Numbers are emitted as JSON
doubles with 17 significant digits; infinities are encoded as the strings
"inf" and "-inf".  Identical analyses produce byte-identical output: key
order is fixed, floats are formatted deterministically, and no timestamps
appear in the data.
"""

from __future__ import annotations

import math
from typing import Any

from .analysis import ConditionReport, Landmarks, Nonlinearity
from .classify import CurveSummary
from .timemap import CurveEndpoints

__all__ = ["render_report", "emit_json"]


def _num(x) -> Any:
    """Map a float-ish value to its JSON representation."""
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _fmt_float(x: float) -> str:
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return f"{x:.17g}"


def emit_json(obj, indent: int = 0) -> str:
    """Canonical JSON text: insertion order preserved, floats at 17
    significant digits."""
    pad = "  " * indent
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        escaped = (obj.replace("\\", "\\\\").replace('"', '\\"')
                   .replace("\n", "\\n").replace("\t", "\\t"))
        return f'"{escaped}"'
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isnan(obj):
            return "null"
        if math.isinf(obj):
            return '"inf"' if obj > 0 else '"-inf"'
        return _fmt_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(f'{pad}  {emit_json(str(k))}: '
                           f'{emit_json(v, indent + 1)}'
                           for k, v in obj.items())
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        inner = ",\n".join(f"{pad}  {emit_json(v, indent + 1)}" for v in obj)
        return "[\n" + inner + "\n" + pad + "]"
    return emit_json(float(obj), indent)


def _landmarks_dict(lm: Landmarks) -> dict:
    return {
        "beta1": _num(lm.beta1),
        "beta2": _num(lm.beta2),
        "beta2_verified_up_to": (_num(lm.u_scan_max)
                                 if lm.beta2_capped else None),
        "eta": _num(lm.eta),
        "sigma": _num(lm.sigma),
        "rho": _num(lm.rho),
        "gamma": _num(lm.gamma),
        "xi": _num(lm.xi),
        "theta_at_beta2": _num(lm.theta_at_beta2),
        "root_error": "1e-12 relative, Newton-polished",
        "notes": list(lm.notes),
    }


def _conditions_dict(cond: ConditionReport) -> dict:
    diags = {}
    for key, value in cond.diagnostics.items():
        diags[key] = _num(value) if isinstance(value, float) else value
    return {
        "P1": cond.P1,
        "P2": cond.P2,
        "H1": cond.H1,
        "H2": cond.H2,
        "H3": cond.H3,
        "H4": cond.H4,
        "f_convex": cond.fpp_positive,
        "f_limit_at_zero": {
            "kind": cond.f0_limit.kind,
            "value": _num(cond.f0_limit.value),
        },
        "diagnostics": diags,
    }


def _endpoints_dict(ep: CurveEndpoints | None) -> dict | None:
    if ep is None:
        return None
    return {
        "lambda_hat": _num(ep.lambda_hat),
        "lambda_hat_error": (_num(ep.lambda_hat_err)
                             if ep.lambda_hat_err is not None else "exact"),
        "lambda_hat_branch": ep.lambda_hat_branch,
        "kappa": _num(ep.kappa),
        "kappa_kind": ep.kappa_kind,
        "kappa_error": (_num(ep.kappa_err)
                        if ep.kappa_err is not None else "exact"),
        "kappa_branch": ep.kappa_branch,
        "G": {
            "value": _num(ep.G.value),
            "error": _num(ep.G.abs_error),
            "certified_by": ep.G.certified_by,
            "converged": ep.G.converged,
        },
    }


def render_report(nl: Nonlinearity, lm: Landmarks, cond: ConditionReport,
                  ep: CurveEndpoints | None, summary: CurveSummary,
                  fixture_name: str | None = None,
                  tol: float = 1e-10,
                  files: dict[str, str] | None = None,
                  verification: dict | None = None,
                  extra_warnings: list[str] | None = None) -> dict:
    """Assemble the full report dictionary in canonical key order."""
    warnings = list(extra_warnings or [])
    if ep is not None:
        warnings.extend(ep.warnings)
    report = {
        "input": {
            "expression": nl.expression,
            "fixture": fixture_name,
            "params": {k: _num(v) for k, v in sorted(nl.params.items())},
            "u_max": _num(nl.u_max),
            "tol": _num(tol),
            "F_mode": nl.F_mode,
        },
        "landmarks": _landmarks_dict(lm),
        "conditions": _conditions_dict(cond),
        "endpoints": _endpoints_dict(ep),
        "classification": {
            "shape": summary.shape.kind.value,
            "rule_fired": summary.shape.rule_fired,
            "start": ([_num(summary.start[0]), _num(summary.start[1])]
                      if summary.start else None),
            "end": ([_num(summary.end[0]), _num(summary.end[1])]
                    if summary.end else None),
        },
        "warnings": warnings,
        "files": dict(files or {}),
    }
    if verification is not None:
        report["verification"] = verification
    return report
