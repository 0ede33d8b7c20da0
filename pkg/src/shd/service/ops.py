"""Service operations: all verification and construction logic behind the API.

Every operation takes a request model and returns a response model with a
deterministic plain-text report; re-running a request yields byte-identical
output.  Exit-status conventions: 0 success, 1 mathematical failure,
2 input/schema error (raised as :class:`shd.serialize.SchemaError` and
mapped by the app layer).
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass

from .. import coalgebra, documents, fixtures
from ..graded import GradedVector, MultilinearMap
from ..homotopy_assoc import AInfinityStructure, SHDerivationA, StructureError
from ..homotopy_assoc import sh_defect as ainfty_sh_defect
from ..homotopy_assoc import tautological_derivation as ainfty_tautological
from ..homotopy_assoc import inner_derivation as ainfty_inner
from ..homotopy_lie import LInfinityStructure, SHDerivationL
from ..homotopy_lie import sh_defect as linfty_sh_defect
from ..homotopy_lie import tautological_derivation as linfty_tautological
from ..homotopy_lie import inner_derivation as linfty_inner
from ..operad import check_d_squared, generator_differential, to_latex
from ..serialize import SchemaError, vector_from_json
from .models import (
    EXIT_MATH_FAILURE,
    EXIT_OK,
    BracketRequest,
    DeriveRequest,
    DocumentResponse,
    FixtureRequest,
    OperadRequest,
    ReportResponse,
    SymmetrizeRequest,
    VerifyRequest,
)

DEFAULT_K_WINDOW = (-1, 0, 1, 2)


@dataclass(frozen=True)
class RunConfig:
    """Run defaults: truncation arity, derivation-degree window, seed, format.

    ``from_environment`` honors the ``SHD_MAX_ARITY`` override.  All commands
    are deterministic given a config (the seed included).
    """

    max_arity: int = documents.DEFAULT_TRUNCATION
    k_window: tuple[int, ...] = DEFAULT_K_WINDOW
    seed: int = 0
    report_format: str = "text"

    def __post_init__(self) -> None:
        if self.max_arity < 1:
            raise ValueError("max_arity must be >= 1")

    @staticmethod
    def from_environment() -> "RunConfig":
        env = os.environ.get("SHD_MAX_ARITY")
        if not env:
            return RunConfig()
        try:
            value = int(env)
        except ValueError:
            raise SchemaError(f"SHD_MAX_ARITY is not an integer: {env!r}") from None
        if value < 1:
            raise SchemaError("SHD_MAX_ARITY must be >= 1")
        return RunConfig(max_arity=value)


def default_max_arity() -> int:
    return RunConfig.from_environment().max_arity


def _resolve_arity(requested: int | None, structure) -> int:
    if requested is not None:
        return requested
    if os.environ.get("SHD_MAX_ARITY"):
        return default_max_arity()
    return structure.truncation


def _format_failure(kind: str, arity: int, defect: MultilinearMap) -> str:
    witness = defect.first_nonzero()
    assert witness is not None
    inputs, value = witness
    return f"{kind} arity {arity}: FAIL at ({', '.join(inputs)}) -> {value}"


def _structure_lines(structure, up_to: int) -> tuple[list[str], bool]:
    lines = []
    ok = True
    for n in range(1, up_to + 1):
        defect = structure.defect(n)
        if defect.is_zero():
            lines.append(f"structure arity {n}: ok")
        else:
            ok = False
            lines.append(_format_failure("structure", n, defect))
    return lines, ok


def _derivation_lines(structure, derivation, up_to: int) -> tuple[list[str], bool]:
    mixed = (
        linfty_sh_defect if isinstance(structure, LInfinityStructure) else ainfty_sh_defect
    )
    lines = []
    ok = True
    for q in range(1, up_to + 1):
        defect = mixed(structure, derivation, q)
        if defect.is_zero():
            lines.append(f"derivation arity {q}: ok")
        else:
            ok = False
            lines.append(_format_failure("derivation", q, defect))
    return lines, ok


def verify(request: VerifyRequest) -> ReportResponse:
    structure, derivation = documents.structure_from_json(request.document)
    declared = "linfty" if isinstance(structure, LInfinityStructure) else "ainfty"
    if request.kind in ("ainfty", "linfty") and request.kind != declared:
        raise SchemaError(
            f"document declares structure {declared!r}, not {request.kind!r}"
        )
    if request.kind == "sh-derivation" and derivation is None:
        raise SchemaError("document carries no derivation ('k'/'theta' missing)")
    up_to = _resolve_arity(request.max_arity, structure)
    lines = [f"kind: {request.kind}", f"max arity: {up_to}"]
    body, ok = _structure_lines(structure, up_to)
    lines.extend(body)
    if request.kind == "sh-derivation":
        assert derivation is not None
        lines.append(f"derivation degree: {derivation.degree}")
        body, dok = _derivation_lines(structure, derivation, up_to)
        lines.extend(body)
        ok = ok and dok
    lines.append("result: PASS" if ok else "result: FAIL")
    return ReportResponse(
        ok=ok, status=EXIT_OK if ok else EXIT_MATH_FAILURE, report="\n".join(lines) + "\n"
    )


def _parse_element(structure, element) -> GradedVector:
    space = structure.space
    if element is None:
        raise SchemaError("inner mode needs an element")
    if isinstance(element, str):
        if element not in space.degrees:
            raise SchemaError(f"unknown basis label {element!r}")
        return space.basis_vector(element)
    terms = []
    for label, coeff in element.items():
        terms.append({"label": label, "num": str(coeff), "den": "1"})
    # allow "p/q" strings by splitting
    cleaned = []
    for item in terms:
        num = item["num"]
        if "/" in num:
            p, q = num.split("/", 1)
            item = {"label": item["label"], "num": p, "den": q}
        cleaned.append(item)
    return vector_from_json(cleaned, space)


def _fail(report_lines: list[str]) -> DocumentResponse:
    return DocumentResponse(
        ok=False,
        status=EXIT_MATH_FAILURE,
        report="\n".join(report_lines) + "\n",
        document=None,
    )


def derive(request: DeriveRequest) -> DocumentResponse:
    structure, _ = documents.structure_from_json(request.document)
    up_to = _resolve_arity(request.max_arity, structure)
    structure.truncation = up_to
    is_lie = isinstance(structure, LInfinityStructure)
    bad = structure.verify(up_to)
    if bad:
        return _fail([f"structure fails verification at arities {bad}"])
    if request.mode == "tautological":
        derivation = (linfty_tautological if is_lie else ainfty_tautological)(structure)
        note = "tautological derivation: theta_q = structure maps, degree 1"
    elif request.mode == "inner":
        element = _parse_element(structure, request.element)
        try:
            if element.degree() is None:
                derivation = (
                    SHDerivationL(1, {}, space=structure.space, truncation=up_to)
                    if is_lie
                    else SHDerivationA(1, {}, space=structure.space, truncation=up_to)
                )
            elif is_lie:
                derivation = linfty_inner(structure, element)
            else:
                derivation = ainfty_inner(structure, element)
        except StructureError as exc:
            return _fail([f"inner derivation rejected: {exc}"])
        note = f"inner derivation of {element}"
    else:  # reservoir
        rng = random.Random(request.seed)
        maps = fixtures.random_derivation_family(
            structure.space,
            request.xi_degree,
            rng,
            max_arity=max(1, up_to - 1),
            symmetric=is_lie,
        )
        flavor = "symmetric" if is_lie else "tensor"
        xi = coalgebra.Coderivation(structure.space, request.xi_degree, flavor, maps)
        if is_lie:
            derivation = coalgebra.reservoir_derivation_lie(structure, xi, up_to=up_to)
        else:
            derivation = coalgebra.reservoir_derivation(structure, xi, up_to=up_to)
        note = f"reservoir derivation from seeded coderivation (seed={request.seed}, xi degree={request.xi_degree})"
    body, ok = _derivation_lines(structure, derivation, up_to)
    lines = [note, *body, "result: PASS" if ok else "result: FAIL"]
    if not ok:
        return _fail(lines)
    doc = documents.structure_to_json(structure, derivation)
    return DocumentResponse(ok=True, status=EXIT_OK, report="\n".join(lines) + "\n", document=doc)


def symmetrize(request: SymmetrizeRequest) -> DocumentResponse:
    structure, derivation = documents.structure_from_json(request.document)
    if not isinstance(structure, AInfinityStructure):
        raise SchemaError("symmetrize expects an 'ainfty' document")
    up_to = _resolve_arity(request.max_arity, structure)
    structure.truncation = up_to
    bad = structure.verify(up_to)
    if bad:
        return _fail([f"structure fails verification at arities {bad}; refusing to symmetrize"])
    if derivation is not None:
        bad_theta = [
            q for q in range(1, up_to + 1) if not ainfty_sh_defect(structure, derivation, q).is_zero()
        ]
        if bad_theta:
            return _fail(
                [f"derivation fails verification at arities {bad_theta}; refusing to symmetrize"]
            )
    lie_structure = coalgebra.symmetrize_structure(structure)
    lie_structure.truncation = up_to
    lines, ok = _structure_lines(lie_structure, up_to)
    lie_derivation = None
    if derivation is not None:
        lie_derivation = coalgebra.symmetrize_derivation(structure, derivation)
        body, dok = _derivation_lines(lie_structure, lie_derivation, up_to)
        lines.extend(body)
        ok = ok and dok
    lines.append("result: PASS" if ok else "result: FAIL")
    if not ok:
        return _fail(lines)
    doc = documents.structure_to_json(lie_structure, lie_derivation)
    return DocumentResponse(ok=True, status=EXIT_OK, report="\n".join(lines) + "\n", document=doc)


def bracket(request: BracketRequest) -> DocumentResponse:
    structure1, derivation1 = documents.structure_from_json(request.document1)
    structure2, derivation2 = documents.structure_from_json(request.document2)
    if derivation1 is None or derivation2 is None:
        raise SchemaError("both documents must carry derivations")
    if type(structure1) is not type(structure2) or structure1.space != structure2.space:
        raise SchemaError("derivations belong to different structures")
    if structure1.maps != structure2.maps:
        raise SchemaError("derivations belong to different structures")
    is_lie = isinstance(structure1, LInfinityStructure)
    up_to = _resolve_arity(request.max_arity, structure1)
    structure1.truncation = up_to
    bad = structure1.verify(up_to)
    if bad:
        return _fail([f"structure fails verification at arities {bad}"])
    for tag, derivation in (("first", derivation1), ("second", derivation2)):
        body, ok = _derivation_lines(structure1, derivation, up_to)
        if not ok:
            return _fail([f"{tag} derivation fails verification", *body])
    f = coalgebra.coderivation_from_derivation(derivation1)
    g = coalgebra.coderivation_from_derivation(derivation2)
    b = coalgebra.bracket(f, g, up_to=up_to)
    k = derivation1.degree + derivation2.degree
    if is_lie:
        out: SHDerivationA | SHDerivationL = SHDerivationL(
            k, b.projections, space=structure1.space, truncation=up_to
        )
    else:
        out = SHDerivationA(k, b.projections, space=structure1.space, truncation=up_to)
    body, ok = _derivation_lines(structure1, out, up_to)
    lines = [f"bracket degree: {k}", *body, "result: PASS" if ok else "result: FAIL"]
    if not ok:
        return _fail(lines)
    doc = documents.structure_to_json(structure1, out)
    return DocumentResponse(ok=True, status=EXIT_OK, report="\n".join(lines) + "\n", document=doc)


def _plain_text(latex: str) -> str:
    out = latex.replace(r"\bar{x}", "xb")
    out = out.replace(r"\mathsf{1}", "1")
    out = out.replace(r"\circ_{", " o_").replace(r"\phi", "phi")
    return out.replace("{", "").replace("}", "")


def _render(latex: str, fmt: str) -> str:
    return latex if fmt == "latex" else _plain_text(latex)


def operad(request: OperadRequest) -> ReportResponse:
    max_arity = request.max_arity
    if max_arity is None:
        max_arity = max(default_max_arity(), 2)
    ks = request.k if request.k else list(DEFAULT_K_WINDOW)
    if request.action == "print-diff":
        arity = request.arity
        if arity is None:
            raise SchemaError("print-diff needs an arity")
        lines = [f"preset: {request.preset}", f"arity: {arity}"]
        dx = generator_differential(request.preset, f"x{arity}", 0)
        lines.append(f"d x^{arity} = " + _render(to_latex(dx), request.format))
        for k in ks:
            dxb = generator_differential(request.preset, f"xb{arity}", k)
            lines.append(
                f"d xbar^{arity} (k={k}) = " + _render(to_latex(dxb), request.format)
            )
        return ReportResponse(ok=True, status=EXIT_OK, report="\n".join(lines) + "\n")
    lines = [f"preset: {request.preset}", f"max arity: {max_arity}", f"k window: {ks}"]
    ok = True
    for k in ks:
        report = check_d_squared(request.preset, k, max_arity)
        for check in report.checks:
            if check.ok:
                lines.append(f"k={k} {check.generator}: ok")
            else:
                ok = False
                lines.append(
                    f"k={k} {check.generator}: FAIL residue = "
                    + _render(to_latex(check.residue), request.format)
                )
    lines.append("result: PASS" if ok else "result: FAIL")
    return ReportResponse(
        ok=ok, status=EXIT_OK if ok else EXIT_MATH_FAILURE, report="\n".join(lines) + "\n"
    )


def fixture(request: FixtureRequest) -> DocumentResponse:
    name = request.name
    builders = {
        "dual-numbers": fixtures.dual_numbers,
        "exterior": fixtures.exterior_algebra,
        "solvable2": fixtures.solvable2,
    }
    if name not in builders:
        raise SchemaError(
            f"unknown fixture {name!r}; available: {', '.join(sorted(builders))}"
        )
    structure = builders[name]()
    doc = documents.structure_to_json(structure, comment=fixtures.FIXTURE_NOTES[name])
    return DocumentResponse(
        ok=True, status=EXIT_OK, report=f"fixture: {name}\n", document=doc
    )
