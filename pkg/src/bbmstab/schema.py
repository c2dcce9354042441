"""JSON schemas for problem input and emitted reports, plus pinned serialization."""

from __future__ import annotations

import json
import math

import jsonschema

_number = {"type": "number"}
_num_or_null = {"type": ["number", "null"]}

OMEGA = {
    "oneOf": [
        {"type": "number", "exclusiveMinimum": 1},
        {"type": "array", "items": {"type": "number", "exclusiveMinimum": 1}, "minItems": 1},
        {
            "type": "object",
            "properties": {
                "start": {"type": "number", "exclusiveMinimum": 1},
                "stop": {"type": "number", "exclusiveMinimum": 1},
                "num": {"type": "integer", "minimum": 1},
                "spacing": {"enum": ["linear", "log"]},
            },
            "required": ["start", "stop", "num"],
            "additionalProperties": False,
        },
    ]
}

GRID = {
    "type": "object",
    "properties": {
        "half_width": _num_or_null,
        "n_points": {"type": "integer", "minimum": 16},
        "scheme": {"enum": ["fd2", "fd4", "spectral"]},
        "richardson": {"type": "boolean"},
        "k": {"type": "integer", "minimum": 1},
    },
    "additionalProperties": False,
}

INITIAL = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["exact", "amplitude", "bump", "two_speed"]},
        "eps": _number,
        "omega2": {"type": "number", "exclusiveMinimum": 1},
        "bump_center": _number,
        "bump_width": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

SIM = {
    "type": "object",
    "properties": {
        "domain_length": {"type": "number", "exclusiveMinimum": 0},
        "n_modes": {"type": "integer", "minimum": 8},
        "dt": {"type": "number", "exclusiveMinimum": 0},
        "t_end": {"type": "number", "minimum": 0},
        "dealias": {"type": ["boolean", "null"]},
        "sample_every": {"type": "integer", "minimum": 1},
        "stable_factor": {"type": "number", "exclusiveMinimum": 0},
        "unstable_factor": {"type": "number", "exclusiveMinimum": 0},
        "snapshot_times": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "initial": INITIAL,
    },
    "additionalProperties": False,
}

PROBLEM = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "p": {"type": "integer", "minimum": 1},
        "coeffs": {"type": "array", "items": _number, "minItems": 4},
        "mu": _num_or_null,
        "omega": OMEGA,
        "grid": GRID,
        "sim": SIM,
    },
    "required": ["p", "coeffs"],
    "additionalProperties": False,
}

_matrix = {"type": "array", "items": {"type": "array", "items": _number, "minItems": 2, "maxItems": 2},
           "minItems": 2, "maxItems": 2}

RATIO_ENTRY = {
    "type": "object",
    "properties": {
        "mu": _number,
        "hu": _number,
        "admissible": {"type": "boolean"},
        "M": _matrix,
        "detM": _number,
        "eigvals": {"type": "array", "items": _number},
        "orthogonal": _matrix,
        "verdict": {"enum": ["StableAllSpeeds", "ThresholdStable", "CriterionFails", "NotAdmissible"]},
        "bound": _number,
        "omega_p": _num_or_null,
    },
    "required": ["mu", "hu", "admissible", "verdict"],
}

ANALYSIS_REPORT = {
    "type": "object",
    "properties": {
        "kind": {"const": "analysis"},
        "p": {"type": "integer"},
        "coeffs": {"type": "array", "items": _number},
        "continuum_of_ratios": {"type": "boolean"},
        "ratios": {"type": "array", "items": RATIO_ENTRY},
    },
    "required": ["kind", "p", "coeffs", "ratios"],
}

_numlist = {"type": "array", "items": _number}

SPECTRUM_ENTRY = {
    "type": "object",
    "properties": {
        "p": {"type": "integer"},
        "omega": _number,
        "mu": _number,
        "detM": _number,
        "cont_edge": _number,
        "analytic_L1_least": _number,
        "analytic_L1_eigs": _numlist,
        "analytic_L2_eigs": _numlist,
        "numeric_L1_eigs": _numlist,
        "numeric_L2_eigs": _numlist,
        "zero_mode_residual": _number,
        "block_max_diff": _number,
        "n_negative": {"type": "integer"},
        "has_zero_mode": {"type": "boolean"},
        "L2_positive": {"type": "boolean"},
        "flags_ok": {"type": "boolean"},
    },
    "required": ["p", "omega", "detM", "analytic_L1_least", "numeric_L1_eigs", "numeric_L2_eigs", "cont_edge",
                 "zero_mode_residual", "L2_positive"],
}

SPECTRUM_REPORT = {
    "type": "object",
    "properties": {"kind": {"const": "spectrum"}, "reports": {"type": "array", "items": SPECTRUM_ENTRY}},
    "required": ["kind", "reports"],
}

SIMULATION_REPORT = {
    "type": "object",
    "properties": {
        "kind": {"const": "simulation"},
        "tag": {"enum": ["Heuristic-Stable", "Heuristic-Unstable", "Indeterminate", "n/a"]},
        "initial_deviation": _number,
        "max_deviation": _number,
        "final_deviation": _number,
        "omega_drift": _number,
        "theta_drift": _number,
        "n_samples": {"type": "integer"},
        "files": {"type": "array", "items": {"type": "string"}},
    },
    "required": ["kind", "tag", "initial_deviation", "final_deviation", "omega_drift", "theta_drift"],
}

EXAMPLE_REPORT = {
    "type": "object",
    "properties": {
        "kind": {"const": "example"},
        "example": {"type": "integer", "minimum": 1, "maximum": 4},
        "passed": {"type": "boolean"},
        "entries": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "name": {"type": "string"},
                    "value": {"type": ["number", "string", "null"]},
                    "golden": {"type": ["number", "string", "null"]},
                    "tol": _num_or_null,
                    "ok": {"type": "boolean"},
                },
                "required": ["name", "value", "golden", "ok"],
            },
        },
    },
    "required": ["kind", "example", "passed", "entries"],
}

REPORT_SCHEMAS = {
    "analysis": ANALYSIS_REPORT,
    "spectrum": SPECTRUM_REPORT,
    "simulation": SIMULATION_REPORT,
    "example": EXAMPLE_REPORT,
}


def validate_problem(doc: dict) -> None:
    jsonschema.validate(doc, PROBLEM)
    if len(doc["coeffs"]) != doc["p"] + 3:
        raise jsonschema.ValidationError(f"coeffs must have p + 3 = {doc['p'] + 3} entries, got {len(doc['coeffs'])}")


def validate_report(doc: dict) -> None:
    jsonschema.validate(doc, REPORT_SCHEMAS[doc["kind"]])


def _clean(obj):
    # non-finite floats become null so the output stays strict JSON
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "tolist"):  # numpy arrays and scalars
        return _clean(obj.tolist())
    return obj


def dumps(doc: dict) -> str:
    """Deterministic JSON: sorted keys, shortest round-trip float repr (at most 17 digits)."""
    return json.dumps(_clean(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"
