"""JSON interchange for matroids (format ``matroid-v1``).

Documents use 1-based element indices and rationals written as ``"p/q"``
strings.  Everything is schema-validated before any matroid is built.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

import jsonschema

from .matroid import (
    Matroid, MatroidError, elems_of, from_circuits, from_lines, graphic, realization, uniform,
)

FORMAT = "matroid-v1"

_INDEX_LIST = {"type": "array", "items": {"type": "integer", "minimum": 1}}

SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["format", "n", "definition"],
    "properties": {
        "format": {"const": FORMAT},
        "name": {"type": "string"},
        "description": {"type": "string"},
        "n": {"type": "integer", "minimum": 0},
        "labels": {"type": "array", "items": {"type": "string"}},
        "realization": {"type": "array", "items": {"type": "array", "items": {"type": "string"}}},
        "checks": {"type": "object"},
        "definition": {
            "type": "object",
            "required": ["kind"],
            "oneOf": [
                {"properties": {"kind": {"const": "circuits"},
                                "circuits": {"type": "array", "items": _INDEX_LIST}},
                 "required": ["circuits"]},
                {"properties": {"kind": {"const": "uniform"},
                                "rank": {"type": "integer", "minimum": 0}},
                 "required": ["rank"]},
                {"properties": {"kind": {"const": "graph"},
                                "vertices": {"type": "integer", "minimum": 0},
                                "edges": {"type": "array", "items": {
                                    "type": "array", "items": {"type": "integer", "minimum": 1},
                                    "minItems": 2, "maxItems": 2}}},
                 "required": ["vertices", "edges"]},
                {"properties": {"kind": {"const": "realization"},
                                "matrix": {"type": "array", "items": {
                                    "type": "array",
                                    "items": {"type": "string",
                                              "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$"}}}},
                 "required": ["matrix"]},
                {"properties": {"kind": {"const": "lines"},
                                "lines": {"type": "array", "items": _INDEX_LIST}},
                 "required": ["lines"]},
            ],
        },
    },
}


class InputError(ValueError):
    """Invalid document; ``pointer`` is a JSON pointer to the offending field."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer or "/"


def _pointer(path) -> str:
    return "".join(f"/{p}" for p in path)


def validate(doc: Any) -> None:
    """Schema check; raises :class:`InputError` at the deepest failing field."""
    validator = jsonschema.Draft7Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: -len(e.absolute_path))
    if errors:
        err = errors[0]
        if err.validator == "oneOf" and isinstance(doc, dict):
            kind = doc.get("definition", {}).get("kind")
            for sub in err.context or []:
                if sub.relative_path and sub.relative_path[0] == "kind":
                    continue
                branch = SCHEMA["properties"]["definition"]["oneOf"][sub.schema_path[0]]
                if branch["properties"]["kind"]["const"] == kind:
                    err = sub
                    raise InputError(err.message, _pointer(err.absolute_path))
            raise InputError(f"unknown or malformed definition kind {kind!r}", "/definition/kind")
        raise InputError(err.message, _pointer(err.absolute_path))


def _check_range(items, n: int, where: str) -> None:
    for i, grp in enumerate(items):
        for j, e in enumerate(grp):
            if not 1 <= e <= n:
                raise InputError(f"index {e} outside 1..{n}", f"{where}/{i}/{j}")


def parse_document(doc: Any) -> Matroid:
    """Build a matroid from a validated ``matroid-v1`` document."""
    validate(doc)
    n = doc["n"]
    d = doc["definition"]
    kind = d["kind"]
    try:
        if kind == "circuits":
            _check_range(d["circuits"], n, "/definition/circuits")
            m = from_circuits(n, [[e - 1 for e in c] for c in d["circuits"]])
        elif kind == "uniform":
            m = uniform(d["rank"], n)
        elif kind == "graph":
            _check_range(d["edges"], d["vertices"], "/definition/edges")
            if len(d["edges"]) != n:
                raise InputError(f"graph has {len(d['edges'])} edges but n = {n}", "/n")
            m = graphic(d["vertices"], [(u - 1, v - 1) for u, v in d["edges"]])
        elif kind == "realization":
            rows = d["matrix"]
            for i, r in enumerate(rows):
                if len(r) != n:
                    raise InputError(f"row has {len(r)} entries, expected {n}", f"/definition/matrix/{i}")
            try:
                m = realization([[Fraction(x.replace(" ", "")) for x in r] for r in rows])
            except ZeroDivisionError as exc:
                raise InputError("zero denominator", "/definition/matrix") from exc
        else:
            _check_range(d["lines"], n, "/definition/lines")
            m = from_lines(n, [[e - 1 for e in l] for l in d["lines"]])
    except MatroidError as exc:
        raise InputError(str(exc), "/definition") from exc
    labels = doc.get("labels")
    if labels is not None:
        if len(labels) != n:
            raise InputError(f"{len(labels)} labels for {n} elements", "/labels")
        m = Matroid(m.n, m.circuits, m.kind, labels)
    return m


def to_document(m: Matroid, name: str | None = None) -> dict:
    """Serialize as a ``circuits`` document (1-based)."""
    doc: dict[str, Any] = {"format": FORMAT, "n": m.n}
    if name:
        doc["name"] = name
    doc["labels"] = list(m.labels)
    doc["definition"] = {"kind": "circuits",
                         "circuits": [[e + 1 for e in elems_of(c)] for c in m.circuits]}
    return doc


def loads(text: str) -> Matroid:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc.msg} at line {exc.lineno}") from exc
    return parse_document(doc)


def dumps(m: Matroid, name: str | None = None) -> str:
    return json.dumps(to_document(m, name), indent=2)
