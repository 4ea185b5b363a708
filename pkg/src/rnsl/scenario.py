"""Scenario files: schema, validation, and canonical digests.

A scenario fixes everything a run depends on: the probability space, the
operator pair with its growth certificate, the evaluation grids, and which
suites to run.  Validation failures surface as SchemaError with a JSON
pointer to the offending element.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import jsonschema
import numpy as np

from .errors import SchemaError
from .l0 import L0Scalar, ProbabilitySpace, make_space
from .rn import ExponentialBound, L0Operator

_NUMBER_LIST = {"type": "array", "items": {"type": "number"}, "minItems": 1}
_MATRIX = {
    "type": "array",
    "items": _NUMBER_LIST,
    "minItems": 1,
}
_OPERATOR = {
    "type": "object",
    "properties": {
        "matrix": _MATRIX,
        "matrices": {"type": "array", "items": _MATRIX, "minItems": 1},
    },
    "minProperties": 1,
    "maxProperties": 1,
    "additionalProperties": False,
}
_SCALAR_OR_LIST = {
    "anyOf": [{"type": "number"}, _NUMBER_LIST],
}

SCENARIO_SCHEMA = {
    "type": "object",
    "properties": {
        "space": {
            "type": "object",
            "properties": {"probs": _NUMBER_LIST},
            "required": ["probs"],
            "additionalProperties": False,
        },
        "dim": {"type": "integer", "minimum": 1},
        "operators": {
            "type": "object",
            "properties": {"A": _OPERATOR, "C": _OPERATOR},
            "required": ["A", "C"],
            "additionalProperties": False,
        },
        "bound": {
            "type": "object",
            "properties": {"M": _SCALAR_OR_LIST, "xi": _SCALAR_OR_LIST},
            "required": ["M", "xi"],
            "additionalProperties": False,
        },
        "eta_grid": _NUMBER_LIST,
        "eta_sequence": _NUMBER_LIST,
        "time_grid": {"type": "array", "items": {"type": "number"}, "minItems": 2},
        "k_ladder": {
            "type": "array",
            "items": {"type": "integer", "minimum": 1},
            "minItems": 1,
        },
        "suites": {
            "type": "array",
            "items": {"type": "string"},
            "minItems": 1,
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": {"type": "number"},
        },
        "seed": {"type": "integer", "minimum": 0},
        "instances": {"type": "integer", "minimum": 1},
        "yosida_time": {"type": "number", "exclusiveMinimum": 0},
        "out_dir": {"type": "string"},
    },
    "required": ["space", "dim", "operators", "bound", "suites"],
    "additionalProperties": False,
}

_DEFAULT_ETA_GRID = (2.0, 4.0, 8.0, 16.0)
_DEFAULT_ETA_SEQUENCE = (10.0, 20.0, 40.0, 80.0, 160.0)
_DEFAULT_K_LADDER = (8, 64, 512)


@dataclass(frozen=True)
class Scenario:
    space: ProbabilitySpace
    dim: int
    A: L0Operator
    C: L0Operator
    bound: ExponentialBound
    eta_grid: tuple
    eta_sequence: tuple
    time_grid: tuple
    k_ladder: tuple
    suites: tuple
    tolerances: dict
    seed: int
    instances: int
    yosida_time: float
    out_dir: str | None
    digest: str

    def tolerance(self, key: str, default: float) -> float:
        return float(self.tolerances.get(key, default))


def canonical_digest(doc: dict) -> str:
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def _pointer(error: jsonschema.ValidationError) -> str:
    return "/" + "/".join(str(part) for part in error.absolute_path)


def _operator_from(doc: dict, space: ProbabilitySpace, dim: int, name: str) -> L0Operator:
    spec = doc["operators"][name]
    if "matrix" in spec:
        mat = np.asarray(spec["matrix"], dtype=float)
        if mat.shape != (dim, dim):
            raise SchemaError(
                f"operator {name} has shape {mat.shape}, expected ({dim}, {dim})",
                pointer=f"/operators/{name}/matrix",
            )
        return L0Operator.from_matrix(space, mat)
    mats = np.asarray(spec["matrices"], dtype=float)
    if mats.shape != (space.n_atoms, dim, dim):
        raise SchemaError(
            f"operator {name} has shape {mats.shape}, expected "
            f"({space.n_atoms}, {dim}, {dim})",
            pointer=f"/operators/{name}/matrices",
        )
    return L0Operator.of(space, mats)


def _scalar_from(doc, space: ProbabilitySpace, pointer: str) -> L0Scalar:
    if isinstance(doc, (int, float)):
        return L0Scalar.constant(space, float(doc))
    values = np.asarray(doc, dtype=float)
    if values.shape != (space.n_atoms,):
        raise SchemaError(
            f"expected {space.n_atoms} per-atom values, got shape {values.shape}",
            pointer=pointer,
        )
    return L0Scalar.of(space, values)


def scenario_from_dict(doc: dict) -> Scenario:
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        first = errors[0]
        raise SchemaError(first.message, pointer=_pointer(first))

    try:
        space = make_space(doc["space"]["probs"])
    except Exception as exc:
        raise SchemaError(str(exc), pointer="/space/probs") from exc

    dim = int(doc["dim"])
    A = _operator_from(doc, space, dim, "A")
    C = _operator_from(doc, space, dim, "C")
    big_m = _scalar_from(doc["bound"]["M"], space, "/bound/M")
    xi = _scalar_from(doc["bound"]["xi"], space, "/bound/xi")
    if np.any(big_m.values < 0.0):
        raise SchemaError("certificate constant M must be nonnegative", pointer="/bound/M")
    bound = ExponentialBound(big_m, xi)

    time_grid = tuple(float(t) for t in doc.get("time_grid", ()))
    if not time_grid:
        time_grid = tuple(np.linspace(0.0, 1.0, 21))

    return Scenario(
        space=space,
        dim=dim,
        A=A,
        C=C,
        bound=bound,
        eta_grid=tuple(float(v) for v in doc.get("eta_grid", _DEFAULT_ETA_GRID)),
        eta_sequence=tuple(
            float(v) for v in doc.get("eta_sequence", _DEFAULT_ETA_SEQUENCE)
        ),
        time_grid=time_grid,
        k_ladder=tuple(int(k) for k in doc.get("k_ladder", _DEFAULT_K_LADDER)),
        suites=tuple(doc["suites"]),
        tolerances=dict(doc.get("tolerances", {})),
        seed=int(doc.get("seed", 0)),
        instances=int(doc.get("instances", 200)),
        yosida_time=float(doc.get("yosida_time", 1.0)),
        out_dir=doc.get("out_dir"),
        digest=canonical_digest(doc),
    )


def load_scenario(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}", pointer="") from exc
    if not isinstance(doc, dict):
        raise SchemaError("scenario must be a JSON object", pointer="")
    return scenario_from_dict(doc)
