"""Structure documents: JSON round-trips for structures and derivations.

A structure document extends the space schema with::

    {"structure": "ainfty" | "linfty", "truncation": int, "m": [maps...],
     "k": "int" (optional), "theta": [maps...] (optional),
     "comment": str (optional)}

For ``linfty`` documents the ``m`` key holds the graded-symmetric family.
A document with ``theta`` present is a derivation document; ``verify`` with
kind ``sh-derivation`` checks both the structure and the mixed relations.
"""

from __future__ import annotations

from typing import Any

from .graded import GradedVectorSpace
from .homotopy_assoc import AInfinityStructure, SHDerivationA
from .homotopy_lie import LInfinityStructure, SHDerivationL
from .serialize import (
    SchemaError,
    _int_in,
    _int_out,
    map_from_json,
    maps_from_json,
    maps_to_json,
    space_from_json,
    space_to_json,
    vector_from_json,
    vector_to_json,
)

Structure = AInfinityStructure | LInfinityStructure
Derivation = SHDerivationA | SHDerivationL

DEFAULT_TRUNCATION = 4


def structure_to_json(
    structure: Structure,
    derivation: Derivation | None = None,
    comment: str | None = None,
) -> dict:
    doc = space_to_json(structure.space)
    doc["structure"] = "linfty" if isinstance(structure, LInfinityStructure) else "ainfty"
    doc["truncation"] = structure.truncation
    doc["m"] = maps_to_json(structure.maps, "m")
    if derivation is not None:
        doc["k"] = _int_out(derivation.degree)
        doc["theta"] = maps_to_json(derivation.maps, "theta")
    if comment:
        doc["comment"] = comment
    return doc


def structure_from_json(doc: Any) -> tuple[Structure, Derivation | None]:
    if not isinstance(doc, dict):
        raise SchemaError("document must be an object")
    kind = doc.get("structure")
    if kind not in ("ainfty", "linfty"):
        raise SchemaError("'structure' must be 'ainfty' or 'linfty'")
    space = space_from_json(doc)
    truncation = _int_in(doc.get("truncation", DEFAULT_TRUNCATION), "truncation")
    if truncation < 1:
        raise SchemaError("truncation must be >= 1")
    maps = maps_from_json(doc.get("m", []), space, degree_of=lambda n: 1)
    try:
        if kind == "ainfty":
            structure: Structure = AInfinityStructure(space, maps, truncation=truncation)
        else:
            structure = LInfinityStructure(space, maps, truncation=truncation)
    except ValueError as exc:
        raise SchemaError(str(exc)) from None
    derivation: Derivation | None = None
    if "theta" in doc or "k" in doc:
        if "k" not in doc:
            raise SchemaError("derivation documents need 'k'")
        k = _int_in(doc["k"], "derivation degree k")
        thetas = maps_from_json(doc.get("theta", []), space, degree_of=lambda n: k)
        try:
            if kind == "ainfty":
                derivation = SHDerivationA(k, thetas, space=space, truncation=truncation)
            else:
                derivation = SHDerivationL(k, thetas, space=space, truncation=truncation)
        except ValueError as exc:
            raise SchemaError(str(exc)) from None
    return structure, derivation


def coderivation_to_json(coderivation) -> dict:
    from .coalgebra import Coderivation

    assert isinstance(coderivation, Coderivation)
    doc = {
        "degree": _int_out(coderivation.degree),
        "flavor": coderivation.flavor,
        "projections": maps_to_json(coderivation.projections, "f"),
    }
    if coderivation.theta0 is not None:
        doc["theta0"] = vector_to_json(coderivation.theta0)
    return doc


def coderivation_from_json(doc: Any, space: GradedVectorSpace):
    from .coalgebra import Coderivation

    if not isinstance(doc, dict):
        raise SchemaError("coderivation must be an object")
    for key in ("degree", "flavor", "projections"):
        if key not in doc:
            raise SchemaError(f"coderivation missing '{key}'")
    degree = _int_in(doc["degree"], "coderivation degree")
    flavor = doc["flavor"]
    if flavor not in ("tensor", "symmetric"):
        raise SchemaError("flavor must be 'tensor' or 'symmetric'")
    projections = maps_from_json(doc["projections"], space, degree_of=lambda n: degree)
    theta0 = None
    if "theta0" in doc:
        theta0 = vector_from_json(doc["theta0"], space)
    try:
        return Coderivation(space, degree, flavor, projections, theta0=theta0)
    except ValueError as exc:
        raise SchemaError(str(exc)) from None
