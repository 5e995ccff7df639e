"""Problem files (JSON in) and result documents (JSON out)."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import jsonschema
import mpmath

from .deformation import BetaSpec, DeformedP, Handle, InvariantPoly, PolynomialError
from .engine import PairingResult, PairingSpec, SpecError, Summation
from .lie import RootSystem, RootSystemError, build_root_system, in_closed_alcove
from .series import GeneratorTable
from .volumes import make_marking


class InputError(ValueError):
    """Invalid problem input; the message carries the JSON location."""


_RATIONAL = {"oneOf": [{"type": "integer"}, {"type": "string"}]}
_NAMED_POLY = {
    "type": "object",
    "properties": {"name": {"type": "string", "pattern": "^[A-Za-z][A-Za-z0-9_]*$"}, "poly": {"type": "string"}},
    "required": ["name", "poly"],
    "additionalProperties": False,
}

PROBLEM_SCHEMA: dict = {
    "type": "object",
    "properties": {
        "group": {
            "type": "object",
            "properties": {
                "type": {"type": "string"},
                "rank": {"type": "integer", "minimum": 1},
                "scale": _RATIONAL,
            },
            "required": ["type"],
            "additionalProperties": False,
        },
        "genus": {"type": "integer", "minimum": 0},
        "markings": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"mu": {"type": "array", "items": _RATIONAL}, "Q": {"type": "string"}},
                "required": ["mu"],
                "additionalProperties": False,
            },
        },
        "deformation": {"type": "array", "items": _NAMED_POLY},
        "beta": {
            "type": "object",
            "properties": {
                "sigmas": {"type": "array", "items": _NAMED_POLY},
                "handles": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {
                            "eps1": {"type": "array", "items": _NAMED_POLY},
                            "eps2": {"type": "array", "items": _NAMED_POLY},
                        },
                        "additionalProperties": False,
                    },
                },
            },
            "additionalProperties": False,
        },
        "truncation": {"type": "integer", "minimum": 0, "maximum": 12},
        "summation": {
            "type": "object",
            "properties": {
                "mode": {"enum": ["auto", "truncate", "convergence_factor"]},
                "radius": {"oneOf": [{"type": "number", "exclusiveMinimum": 0}, {"type": "string"}]},
                "epsilons": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 2},
                "tolerance": {"type": "number", "exclusiveMinimum": 0},
                "precision": {"enum": ["double", "extended"]},
                "max_terms": {"type": "integer", "minimum": 1},
                "accelerate": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
        "weights": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
        "points": {"type": "array", "items": {"type": "array", "items": _RATIONAL}},
    },
    "required": ["group"],
    "additionalProperties": False,
}

_COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_BOUND = {"oneOf": [{"type": "number", "minimum": 0}, {"const": "inf"}]}

RESULT_SCHEMA: dict = {
    "type": "object",
    "properties": {
        "coefficients": {"type": "object", "additionalProperties": _COMPLEX},
        "diagnostics": {
            "type": "object",
            "properties": {
                "mode": {"enum": ["truncate", "convergence_factor"]},
                "status": {"enum": ["ok", "tolerance_not_met", "diverged", "budget_exhausted"]},
                "terms_summed": {"type": "integer", "minimum": 0},
                "tail_bound": _BOUND,
                "radius": {"type": ["number", "null"]},
                "accelerated": {"type": "boolean"},
                "plain_tail_estimate": {"oneOf": [_BOUND, {"type": "null"}]},
                "extrapolation_residual": {"type": ["number", "null"]},
                "regulator_trace": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {"epsilon": {"type": "number"}, "coefficients": {"type": "object", "additionalProperties": _COMPLEX}},
                        "required": ["epsilon", "coefficients"],
                        "additionalProperties": False,
                    },
                },
                "precision": {"enum": ["double", "extended"]},
                "group": {"type": "string"},
                "genus": {"type": "integer"},
                "generators": {"type": "object"},
            },
            "required": ["mode", "status", "terms_summed", "tail_bound"],
            "additionalProperties": False,
        },
    },
    "required": ["coefficients", "diagnostics"],
    "additionalProperties": False,
}


def _where(path) -> str:
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


def parse_rational(value: Any, where: str) -> Fraction:
    """Exact rational from an integer or a "p/q" string."""
    if isinstance(value, bool):
        raise InputError(f"{where}: expected a rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        num, _, den = text.partition("/")
        try:
            n = int(num)
            d = int(den) if den else 1
        except ValueError:
            raise InputError(f"{where}: malformed rational {value!r}") from None
        if d == 0:
            raise InputError(f"{where}: malformed rational {value!r} (zero denominator)")
        return Fraction(n, d)
    raise InputError(f"{where}: expected a rational, got {value!r}")


def load_document(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    validator = jsonschema.Draft202012Validator(PROBLEM_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise InputError(f"{_where(e.absolute_path)}: {e.message}")
    return doc


@dataclass
class Problem:
    doc: dict
    rs: RootSystem
    precision: str = "double"

    def weights(self) -> list:
        out = []
        for i, w in enumerate(self.doc.get("weights", [])):
            if len(w) != self.rs.rank:
                raise InputError(f"weights[{i}]: expected {self.rs.rank} coordinates")
            out.append(tuple(w))
        return out

    def points(self) -> list:
        out = []
        for i, p in enumerate(self.doc.get("points", [])):
            if len(p) != self.rs.rank:
                raise InputError(f"points[{i}]: expected {self.rs.rank} coordinates")
            out.append(tuple(parse_rational(c, f"points[{i}][{j}]") for j, c in enumerate(p)))
        return out


def load_group(doc: dict, allow_e8: bool = False) -> RootSystem:
    g = doc["group"]
    scale = parse_rational(g.get("scale", 1), "group.scale")
    try:
        rs = build_root_system(g["type"], g.get("rank"), scale)
    except (RootSystemError, ValueError) as exc:
        raise InputError(f"group: {exc}") from None
    if rs.label == "E8" and not allow_e8:
        raise InputError("group: E8 requires --allow-e8")
    return rs


def load_problem(text: str, allow_e8: bool = False) -> Problem:
    doc = load_document(text)
    rs = load_group(doc, allow_e8)
    precision = doc.get("summation", {}).get("precision", "double")
    return Problem(doc, rs, precision)


def _poly(rs, text: str, where: str) -> InvariantPoly:
    try:
        return InvariantPoly.parse(rs, text)
    except PolynomialError as exc:
        raise InputError(f"{where}: {exc}") from None


def build_spec(problem: Problem) -> PairingSpec:
    """Turn a validated problem document into a PairingSpec."""
    doc, rs = problem.doc, problem.rs
    if "genus" not in doc:
        raise InputError("genus: required for pairing problems")
    deformation = [(d["name"], _poly(rs, d["poly"], f"deformation[{i}].poly")) for i, d in enumerate(doc.get("deformation", []))]
    beta_doc = doc.get("beta", {})
    sigmas = [(d["name"], _poly(rs, d["poly"], f"beta.sigmas[{i}].poly")) for i, d in enumerate(beta_doc.get("sigmas", []))]
    handles = []
    odd: list = []
    for j, h in enumerate(beta_doc.get("handles", [])):
        sides = []
        for side in ("eps1", "eps2"):
            items = []
            for i, d in enumerate(h.get(side, [])):
                items.append((d["name"], _poly(rs, d["poly"], f"beta.handles[{j}].{side}[{i}].poly")))
                if d["name"] not in odd:
                    odd.append(d["name"])
            sides.append(items)
        handles.append(Handle(*sides))
    even = [n for n, _ in deformation] + [n for n, _ in sigmas if n not in {m for m, _ in deformation}]
    if set(even) & set(odd):
        raise InputError("beta: a generator name is used both as even and odd")
    try:
        table = GeneratorTable(tuple(even), tuple(odd), doc.get("truncation", 4))
        P = DeformedP(rs, deformation)
        for _, p in sigmas + [x for h in handles for x in h.eps1 + h.eps2]:
            p.check_invariant(rs)
    except (PolynomialError, ValueError) as exc:
        raise InputError(f"deformation: {exc}") from None
    markings = []
    for i, m in enumerate(doc.get("markings", [])):
        if len(m["mu"]) != rs.rank:
            raise InputError(f"markings[{i}].mu: expected {rs.rank} coordinates")
        mu = tuple(parse_rational(c, f"markings[{i}].mu[{j}]") for j, c in enumerate(m["mu"]))
        if not in_closed_alcove(rs, mu):
            raise InputError(f"markings[{i}].mu: point is outside the closed fundamental alcove")
        Q = _poly(rs, m["Q"], f"markings[{i}].Q") if "Q" in m else None
        try:
            markings.append(make_marking(rs, mu, Q))
        except (PolynomialError, RootSystemError) as exc:
            raise InputError(f"markings[{i}]: {exc}") from None
    s = doc.get("summation", {})
    radius = s.get("radius")
    if isinstance(radius, str):
        radius = float(parse_rational(radius, "summation.radius"))
    summation = Summation(
        mode=s.get("mode", "auto"),
        radius=radius,
        epsilons=tuple(s["epsilons"]) if "epsilons" in s else None,
        tolerance=s.get("tolerance", 1e-10),
        max_terms=s.get("max_terms", Summation.max_terms),
        accelerate=s.get("accelerate", True),
    )
    try:
        return PairingSpec(rs, doc["genus"], markings, P, BetaSpec(sigmas, handles), table, summation)
    except SpecError as exc:
        raise InputError(f"spec: {exc}") from None


# ------------------------------------------------------------------ output


def _number(x) -> str:
    if isinstance(x, mpmath.mpf):
        if not mpmath.isfinite(x):
            return '"inf"'
        return mpmath.nstr(x, mpmath.mp.dps, min_fixed=0, max_fixed=0) if x != 0 else "0"
    x = float(x)
    if math.isinf(x):
        return '"inf"'
    if math.isnan(x):
        raise ValueError("NaN in result")
    text = format(x, ".17g")
    if x == 0:
        return "0"
    return text


def dumps(obj, indent: int = 2, level: int = 0) -> str:
    """Deterministic JSON: sorted keys are the caller's job, floats use 17 significant digits."""
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, (float, mpmath.mpf)):
        return _number(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _complex_pair(c) -> list:
    if isinstance(c, mpmath.mpc):
        return [c.real, c.imag]
    c = complex(c)
    return [c.real, c.imag]


def _coefficients(values: dict) -> dict:
    return {k: _complex_pair(v) for k, v in values.items()}


def result_document(result: PairingResult, spec: PairingSpec, precision: str) -> dict:
    coefficients = _coefficients(result.coefficients) or {"1": [0.0, 0.0]}
    diag = {
        "mode": result.mode,
        "status": result.status,
        "terms_summed": result.terms_summed,
        "tail_bound": result.tail_bound,
        "radius": result.radius,
        "accelerated": result.accelerated,
        "plain_tail_estimate": result.plain_tail_estimate,
        "extrapolation_residual": result.extrapolation_residual,
        "regulator_trace": [{"epsilon": e, "coefficients": _coefficients(v)} for e, v in result.regulator_trace],
        "precision": precision,
        "group": spec.rs.label,
        "genus": spec.genus,
        "generators": {"even": list(spec.table.even), "odd": list(spec.table.odd), "truncation": spec.table.truncation},
    }
    return {"coefficients": coefficients, "diagnostics": diag}


def validate_result(doc: dict) -> None:
    jsonschema.validate(doc, RESULT_SCHEMA)
