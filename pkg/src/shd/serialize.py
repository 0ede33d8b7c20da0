"""JSON schema for spaces, maps, structures, derivations and coderivations.

The on-disk format:

* space:        {"basis": [{"label": str, "degree": "int"}, ...]}
* map:          {"name": str, "arity": int, "degree": "int",
                 "entries": [{"in": [labels], "out": [{"label", "num", "den"}]}]}
* structure:    space keys plus {"structure": "ainfty"|"linfty", "truncation": int,
                 "m": [map, ...], and optionally "k": "int", "theta": [map, ...]}
* coderivation: {"degree": "int", "flavor": "tensor"|"symmetric",
                 "projections": [map, ...], "theta0": [{"label","num","den"}]?}

Exact integers (degrees, numerators, denominators) are serialized as
decimal strings so arbitrary precision survives any JSON reader.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .graded import GradedVector, GradedVectorSpace, MultilinearMap


class SchemaError(ValueError):
    """Raised when a document does not match the expected schema."""


def _int_out(n: int) -> str:
    return str(int(n))


def _int_in(value: Any, what: str) -> int:
    if isinstance(value, bool):
        raise SchemaError(f"{what}: expected an integer, got a boolean")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value, 10)
        except ValueError:
            raise SchemaError(f"{what}: not a decimal integer: {value!r}") from None
    raise SchemaError(f"{what}: expected an integer or decimal string")


def space_to_json(space: GradedVectorSpace) -> dict:
    return {
        "basis": [{"label": l, "degree": _int_out(d)} for l, d in space.basis]
    }


def space_from_json(doc: Any) -> GradedVectorSpace:
    if not isinstance(doc, dict) or "basis" not in doc:
        raise SchemaError("missing 'basis'")
    pairs = []
    for item in doc["basis"]:
        if not isinstance(item, dict) or "label" not in item or "degree" not in item:
            raise SchemaError("basis items need 'label' and 'degree'")
        pairs.append((str(item["label"]), _int_in(item["degree"], "basis degree")))
    try:
        return GradedVectorSpace(tuple(pairs))
    except ValueError as exc:
        raise SchemaError(str(exc)) from None


def vector_to_json(vec: GradedVector) -> list[dict]:
    out = []
    for label, c in sorted(vec.coeffs.items()):
        out.append({"label": label, "num": _int_out(c.numerator), "den": _int_out(c.denominator)})
    return out


def vector_from_json(doc: Any, space: GradedVectorSpace) -> GradedVector:
    if not isinstance(doc, list):
        raise SchemaError("vector must be a list of {label, num, den}")
    coeffs: dict[str, Fraction] = {}
    for item in doc:
        if not isinstance(item, dict) or "label" not in item:
            raise SchemaError("vector terms need 'label'")
        label = str(item["label"])
        if label not in space.degrees:
            raise SchemaError(f"unknown basis label {label!r}")
        num = _int_in(item.get("num", 1), "numerator")
        den = _int_in(item.get("den", 1), "denominator")
        if den == 0:
            raise SchemaError("zero denominator")
        coeffs[label] = coeffs.get(label, Fraction(0)) + Fraction(num, den)
    return GradedVector(space, coeffs)


def map_to_json(f: MultilinearMap, name: str = "") -> dict:
    entries = []
    for inputs in sorted(f.entries):
        entries.append({"in": list(inputs), "out": vector_to_json(f.entries[inputs])})
    return {
        "name": name,
        "arity": f.arity,
        "degree": _int_out(f.degree),
        "entries": entries,
    }


def map_from_json(doc: Any, space: GradedVectorSpace) -> MultilinearMap:
    if not isinstance(doc, dict):
        raise SchemaError("map must be an object")
    for key in ("arity", "degree", "entries"):
        if key not in doc:
            raise SchemaError(f"map missing '{key}'")
    arity = _int_in(doc["arity"], "arity")
    degree = _int_in(doc["degree"], "map degree")
    table: dict[tuple[str, ...], GradedVector] = {}
    for item in doc["entries"]:
        if not isinstance(item, dict) or "in" not in item or "out" not in item:
            raise SchemaError("map entries need 'in' and 'out'")
        inputs = tuple(str(l) for l in item["in"])
        for label in inputs:
            if label not in space.degrees:
                raise SchemaError(f"unknown basis label {label!r}")
        vec = vector_from_json(item["out"], space)
        if inputs in table:
            vec = table[inputs] + vec
        table[inputs] = vec
    try:
        return MultilinearMap(space, arity, degree, table)
    except ValueError as exc:
        raise SchemaError(str(exc)) from None


def maps_to_json(maps: dict[int, MultilinearMap], prefix: str) -> list[dict]:
    return [map_to_json(maps[n], f"{prefix}{n}") for n in sorted(maps)]


def maps_from_json(items: Any, space: GradedVectorSpace, degree_of=None) -> dict[int, MultilinearMap]:
    if not isinstance(items, list):
        raise SchemaError("expected a list of maps")
    out: dict[int, MultilinearMap] = {}
    for item in items:
        f = map_from_json(item, space)
        if f.arity in out:
            raise SchemaError(f"duplicate map of arity {f.arity}")
        if degree_of is not None and not f.is_zero() and f.degree != degree_of(f.arity):
            raise SchemaError(
                f"arity-{f.arity} map must have degree {degree_of(f.arity)}, got {f.degree}"
            )
        out[f.arity] = f
    return out


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def loads(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("top-level document must be an object")
    return doc


def graded_document(space: GradedVectorSpace, maps: dict[str, MultilinearMap]) -> dict:
    """Standalone space-with-named-maps document: {"basis": [...], "maps": [...]}."""
    doc = space_to_json(space)
    doc["maps"] = [map_to_json(maps[name], name) for name in sorted(maps)]
    return doc


def graded_document_load(doc: Any) -> tuple[GradedVectorSpace, dict[str, MultilinearMap]]:
    space = space_from_json(doc)
    maps: dict[str, MultilinearMap] = {}
    for item in doc.get("maps", []):
        f = map_from_json(item, space)
        name = str(item.get("name", "")) or f"map{len(maps)}"
        if name in maps:
            raise SchemaError(f"duplicate map name {name!r}")
        maps[name] = f
    return space, maps
