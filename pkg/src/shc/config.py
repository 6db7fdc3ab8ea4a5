"""Cycle configuration documents (schema ``shc-1``).

A configuration is a JSON document. Matrices are row-major nested arrays;
any number may be given as a JSON number, a decimal string or an exact
rational string ``"p/q"`` (converted to the nearest double).
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema

from .errors import ConfigParseError, ConfigSchemaError, ConfigValidationError
from .model import (CycleIndex, FixedPointChart, PolydiscRadii, Role, SHSimpleCycle,
                    TransitionChart, ValidationReport, validate_cycle)

SCHEMA_VERSION = "shc-1"

_NUM = {"oneOf": [{"type": "number"},
                  {"type": "string", "pattern": r"^\s*[-+]?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?(\s*/\s*\d+)?\s*$"}]}
_POSINT = {"type": "integer", "minimum": 1}
_MATRIX = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": _NUM}}
_VECTOR = {"type": "array", "minItems": 1, "items": _NUM}
_RADII = {"type": "object", "required": ["s", "c", "u"], "additionalProperties": False,
          "properties": {"s": _NUM, "c": _NUM, "u": _NUM}}
_CHART = {"type": "object", "required": ["stable", "center", "unstable", "radii"],
          "additionalProperties": False,
          "properties": {"stable": _MATRIX, "center": _NUM, "unstable": _MATRIX, "radii": _RADII}}
_TRANSITION = {"type": "object",
               "required": ["sigma", "stable", "unstable", "source_anchor", "target_anchor", "kappa"],
               "additionalProperties": False,
               "properties": {"sigma": _POSINT, "stable": _MATRIX, "unstable": _MATRIX,
                              "center": _NUM, "source_anchor": _VECTOR, "target_anchor": _VECTOR,
                              "kappa": _RADII}}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "dims", "p1", "p2", "t1", "t2"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "dims": {"type": "object", "required": ["d_s", "d_u"], "additionalProperties": False,
                 "properties": {"d_s": _POSINT, "d_u": _POSINT, "d_c": {"const": 1}}},
        "p1": _CHART, "p2": _CHART, "t1": _TRANSITION, "t2": _TRANSITION,
        "planner": {"type": "object", "additionalProperties": False,
                    "properties": {"count": _POSINT, "L": _NUM, "L_prime": _NUM,
                                   "m_floor": _POSINT, "search_cap": _POSINT}},
        "census": {"type": "object", "additionalProperties": False,
                   "properties": {"nmin": _POSINT, "nmax": _POSINT, "max_loops": _POSINT}},
        "perturbation": {"type": "object", "additionalProperties": False,
                         "properties": {"epsilon": _NUM, "a_seq": {"type": "string"},
                                        "count": _POSINT, "width": _NUM}},
        "report": {"type": "object", "additionalProperties": False,
                   "properties": {"r": {"type": "array", "items": _NUM, "minItems": 1},
                                  "max_coeff": _POSINT}},
    },
}

_SECTIONS = ("planner", "census", "perturbation", "report")


def parse_number(x) -> float:
    if isinstance(x, str):
        return float(Fraction(re.sub(r"\s+", "", x)))
    return float(x)


def _matrix(rows, n, path):
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ConfigSchemaError(f"{path}: expected a {n}x{n} matrix", path=path)
    return [[parse_number(v) for v in r] for r in rows]


def _vector(v, n, path):
    if len(v) != n:
        raise ConfigSchemaError(f"{path}: expected {n} entries, got {len(v)}", path=path)
    return [parse_number(x) for x in v]


def _radii(d) -> PolydiscRadii:
    return PolydiscRadii(parse_number(d["s"]), parse_number(d["c"]), parse_number(d["u"]))


@dataclass
class LoadedConfig:
    cycle: SHSimpleCycle
    sections: dict = field(default_factory=dict)
    report: ValidationReport | None = None
    name: str | None = None

    def section(self, key: str) -> dict:
        return self.sections.get(key, {})


def cycle_from_dict(doc: dict) -> tuple[SHSimpleCycle, dict]:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigSchemaError(f"{path}: {exc.message}", path=path) from None
    ds, du = doc["dims"]["d_s"], doc["dims"]["d_u"]
    index = CycleIndex(ds, du)
    charts = {}
    for key, role in (("p1", Role.P1), ("p2", Role.P2)):
        c = doc[key]
        charts[key] = FixedPointChart(role, _matrix(c["stable"], ds, f"{key}/stable"),
                                      parse_number(c["center"]),
                                      _matrix(c["unstable"], du, f"{key}/unstable"), _radii(c["radii"]))
    for key, role in (("t1", Role.P1), ("t2", Role.P2)):
        t = doc[key]
        charts[key] = TransitionChart(
            role, t["sigma"], _matrix(t["stable"], ds, f"{key}/stable"),
            _matrix(t["unstable"], du, f"{key}/unstable"),
            source_anchor=_vector(t["source_anchor"], index.dim, f"{key}/source_anchor"),
            target_anchor=_vector(t["target_anchor"], index.dim, f"{key}/target_anchor"),
            kappa=_radii(t["kappa"]),
            center_multiplier=parse_number(t.get("center", 1)))
    cycle = SHSimpleCycle(index, charts["p1"], charts["p2"], charts["t1"], charts["t2"])
    sections = {k: doc[k] for k in _SECTIONS if k in doc}
    return cycle, sections


def parse_document(text: str, source: str = "<string>") -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}",
                               line=exc.lineno, column=exc.colno) from None


def load_config(path, *, validate: bool = True) -> LoadedConfig:
    """Read, schema-check and build a cycle; raise on axiom failures unless ``validate=False``."""
    path = Path(path)
    doc = parse_document(path.read_text(encoding="utf-8"), str(path))
    return config_from_dict(doc, validate=validate)


def config_from_dict(doc: dict, *, validate: bool = True) -> LoadedConfig:
    cycle, sections = cycle_from_dict(doc)
    report = validate_cycle(cycle)
    if validate and not report.passed:
        ids = ", ".join(report.axioms())
        raise ConfigValidationError(f"cycle violates axioms: {ids}", report=report)
    return LoadedConfig(cycle, sections, report, doc.get("name"))


def default_config_path():
    return resources.files("shc") / "fixtures" / "c0.json"


def load_default(*, validate: bool = True) -> LoadedConfig:
    doc = parse_document(default_config_path().read_text(encoding="utf-8"), "c0.json")
    return config_from_dict(doc, validate=validate)


def _rows(m):
    return [[float(v) for v in row] for row in m]


def serialize(cycle: SHSimpleCycle, sections: dict | None = None, name: str | None = None) -> dict:
    """Inverse of :func:`cycle_from_dict`; floats survive a JSON round trip bit-exactly."""
    def radii(r):
        return {"s": r.s, "c": r.c, "u": r.u}
    doc = {"schema": SCHEMA_VERSION}
    if name:
        doc["name"] = name
    doc["dims"] = {"d_s": cycle.index.d_s, "d_u": cycle.index.d_u}
    for key in ("p1", "p2"):
        c = getattr(cycle, key)
        doc[key] = {"stable": _rows(c.stable), "center": c.center,
                    "unstable": _rows(c.unstable), "radii": radii(c.radii)}
    for key in ("t1", "t2"):
        t = getattr(cycle, key)
        doc[key] = {"sigma": t.sigma, "stable": _rows(t.stable), "unstable": _rows(t.unstable),
                    "center": t.center_multiplier,
                    "source_anchor": [float(x) for x in t.source_anchor],
                    "target_anchor": [float(x) for x in t.target_anchor],
                    "kappa": radii(t.kappa)}
    for k, v in (sections or {}).items():
        doc[k] = v
    return doc


def dumps(cycle: SHSimpleCycle, sections: dict | None = None, name: str | None = None) -> str:
    return json.dumps(serialize(cycle, sections, name), indent=2) + "\n"
