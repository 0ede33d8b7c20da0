"""FastAPI application exposing the verification engine.

Run with ``uvicorn shd.service.app:app``.  Schema and input problems map to
HTTP 422; mathematical failures are ordinary 200 responses with
``ok = false`` and ``status = 1``.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..serialize import SchemaError
from . import ops
from .models import (
    BracketRequest,
    DeriveRequest,
    DocumentResponse,
    FixtureRequest,
    OperadRequest,
    ReportResponse,
    SymmetrizeRequest,
    VerifyRequest,
)

app = FastAPI(
    title="shd",
    version=__version__,
    description="Exact verification of strong homotopy structures and their derivations",
)


def _guard(fn, request):
    try:
        return fn(request)
    except SchemaError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/verify", response_model=ReportResponse)
def verify(request: VerifyRequest) -> ReportResponse:
    return _guard(ops.verify, request)


@app.post("/derive", response_model=DocumentResponse)
def derive(request: DeriveRequest) -> DocumentResponse:
    return _guard(ops.derive, request)


@app.post("/symmetrize", response_model=DocumentResponse)
def symmetrize(request: SymmetrizeRequest) -> DocumentResponse:
    return _guard(ops.symmetrize, request)


@app.post("/bracket", response_model=DocumentResponse)
def bracket(request: BracketRequest) -> DocumentResponse:
    return _guard(ops.bracket, request)


@app.post("/operad", response_model=ReportResponse)
def operad(request: OperadRequest) -> ReportResponse:
    return _guard(ops.operad, request)


@app.post("/fixture", response_model=DocumentResponse)
def fixture(request: FixtureRequest) -> DocumentResponse:
    return _guard(ops.fixture, request)
