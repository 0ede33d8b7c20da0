"""Request/response models of the verification service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

Kind = Literal["ainfty", "linfty", "sh-derivation"]
DeriveMode = Literal["inner", "tautological", "reservoir"]
PresetName = Literal["ass", "lie"]
ReportFormat = Literal["text", "latex"]

EXIT_OK = 0
EXIT_MATH_FAILURE = 1
EXIT_INPUT_ERROR = 2


class VerifyRequest(BaseModel):
    document: dict
    kind: Kind
    max_arity: int | None = Field(default=None, ge=1)


class ReportResponse(BaseModel):
    ok: bool
    status: int
    report: str


class DocumentResponse(ReportResponse):
    document: dict | None = None


class DeriveRequest(BaseModel):
    document: dict
    mode: DeriveMode
    element: str | dict[str, str] | None = None
    seed: int = 0
    xi_degree: int = 0
    max_arity: int | None = Field(default=None, ge=1)


class SymmetrizeRequest(BaseModel):
    document: dict
    max_arity: int | None = Field(default=None, ge=1)


class BracketRequest(BaseModel):
    document1: dict
    document2: dict
    max_arity: int | None = Field(default=None, ge=1)


class OperadRequest(BaseModel):
    preset: PresetName
    k: list[int] | None = None
    max_arity: int | None = Field(default=None, ge=2)
    action: Literal["check-d2", "print-diff"] = "check-d2"
    arity: int | None = Field(default=None, ge=2)
    format: ReportFormat = "text"


class FixtureRequest(BaseModel):
    name: str
