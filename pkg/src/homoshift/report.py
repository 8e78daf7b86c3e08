"""JSON output helpers and the schemas of the command-line reports."""
from __future__ import annotations

import json
import math

NUMBER_OR_NULL = {"type": ["number", "null"]}

_POINT = {"type": "object", "required": ["x", "y"],
          "properties": {"x": {"type": "number"}, "y": {"type": "number"}}}

STAR_SCHEMA = {
    "type": "object",
    "required": ["holds", "via_squarefree", "via_coprime_partials", "detail"],
    "properties": {
        "holds": {"type": "boolean"},
        "via_squarefree": {"type": "boolean"},
        "via_coprime_partials": {"type": "boolean"},
        "detail": {"type": "string"},
    },
}

FACTORS_SCHEMA = {
    "type": "object",
    "required": ["y_mult", "roots", "tau_definite", "tau_degree", "window_center", "scale"],
    "properties": {
        "y_mult": {"type": "integer", "minimum": 0},
        "roots": {"type": "array", "items": {
            "type": "object", "required": ["angle", "mult"],
            "properties": {"angle": {"type": "number"}, "mult": {"type": "integer", "minimum": 1}}}},
        "tau_definite": {"type": "boolean"},
        "tau_degree": {"type": "integer", "minimum": 0},
        "window_center": {"type": "number"},
        "scale": {"type": "number"},
    },
}

CHECK_SCHEMA = {
    "type": "object",
    "required": ["polynomial", "degree", "star", "factors", "window"],
    "properties": {
        "polynomial": {"type": "string"},
        "degree": {"type": "integer", "minimum": 2},
        "star": STAR_SCHEMA,
        "factors": FACTORS_SCHEMA,
        "window": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    },
}

LIFT_SCHEMA = {
    "type": "object",
    "required": ["polynomial", "eta", "star_holds", "samples", "f1_max_deviation", "roots"],
    "properties": {
        "polynomial": {"type": "string"},
        "eta": {"type": "string"},
        "star_holds": {"type": "boolean"},
        "samples": {"type": "array", "items": {
            "type": "object", "required": ["phi", "rho", "F1", "F2"],
            "properties": {k: {"type": "number"} for k in ("phi", "rho", "F1", "F2")}}},
        "f1_max_deviation": {"type": "number", "minimum": 0},
        "roots": {"type": "array", "items": {
            "type": "object", "required": ["angle", "a", "gamma1", "gamma2"],
            "properties": {"angle": {"type": "number"}, "a": {"type": "integer", "minimum": 0},
                           "gamma1": {"type": "number"}, "gamma2": NUMBER_OR_NULL}}},
    },
}

JET_SCHEMA = {
    "type": "object",
    "required": ["domain", "orders", "strips", "sups", "verdicts", "flat"],
    "properties": {
        "domain": {"enum": ["plane", "halfplane"]},
        "orders": {"type": "array", "items": {"type": "integer"}},
        "strips": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        "sups": {"type": "array", "items": {"type": "array", "items": {
            "type": ["number", "null"], "minimum": 0}}},
        "verdicts": {"type": "array", "items": {"type": "boolean"}},
        "flat": {"type": "boolean"},
    },
}

SHIFT_SCHEMA = {
    "type": "object",
    "required": ["ok", "tol", "max_residual", "points", "failures", "flatness"],
    "properties": {
        "ok": {"type": "boolean"},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "max_residual": {"type": "number", "minimum": 0},
        "points": {"type": "array", "items": {
            **_POINT, "required": ["x", "y", "alpha", "residual"],
            "properties": {**_POINT["properties"], "alpha": {"type": "number"},
                           "residual": {"type": "number", "minimum": 0}}}},
        "failures": {"type": "array", "items": {
            **_POINT, "required": ["x", "y", "reason"],
            "properties": {**_POINT["properties"], "reason": {"type": "string"}}}},
        "separatrix_deviation": NUMBER_OR_NULL,
        "flatness": {"oneOf": [{"type": "null"}, JET_SCHEMA]},
        "alpha_error": NUMBER_OR_NULL,
    },
}

SCHEMAS = {"check": CHECK_SCHEMA, "lift": LIFT_SCHEMA, "recover": SHIFT_SCHEMA, "jets": JET_SCHEMA}


def _finite(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def dumps(obj) -> str:
    """Stable UTF-8 JSON: insertion-ordered keys, non-finite floats as null."""
    return json.dumps(_finite(obj), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


__all__ = ["SCHEMAS", "dumps"]
