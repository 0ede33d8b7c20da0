"""Command-line front end: a thin client of the verification service.

All mathematics lives behind the service layer; the CLI only builds
request models, dispatches them (in-process by default, over HTTP when
``--server`` is given), prints reports and writes result documents.

Exit status: 0 success, 1 mathematical failure, 2 input error.
Reports go to stdout for ``verify`` and ``operad``; commands that produce
a document print the report to stderr and the document to ``--out`` (or
stdout when no ``--out`` is given).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .serialize import SchemaError, dumps, loads
from .service import ops
from .service.models import (
    EXIT_INPUT_ERROR,
    BracketRequest,
    DeriveRequest,
    DocumentResponse,
    FixtureRequest,
    OperadRequest,
    ReportResponse,
    SymmetrizeRequest,
    VerifyRequest,
)

_ENDPOINTS = {
    "verify": (ops.verify, ReportResponse),
    "derive": (ops.derive, DocumentResponse),
    "symmetrize": (ops.symmetrize, DocumentResponse),
    "bracket": (ops.bracket, DocumentResponse),
    "operad": (ops.operad, ReportResponse),
    "fixture": (ops.fixture, DocumentResponse),
}


class Client:
    """Dispatches request models either in-process or to a remote server."""

    def __init__(self, server: str | None):
        self.server = server.rstrip("/") if server else None

    def call(self, endpoint: str, request):
        handler, response_model = _ENDPOINTS[endpoint]
        if self.server is None:
            try:
                return handler(request)
            except SchemaError as exc:
                _input_error(str(exc))
        import httpx

        reply = httpx.post(
            f"{self.server}/{endpoint}", json=request.model_dump(), timeout=600.0
        )
        if reply.status_code == 422:
            detail = reply.json().get("detail", reply.text)
            _input_error(str(detail))
        reply.raise_for_status()
        return response_model.model_validate(reply.json())


def _input_error(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_INPUT_ERROR)


def _load_document(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        _input_error(f"cannot read {path}: {exc}")
    try:
        return loads(text)
    except SchemaError as exc:
        _input_error(f"{path}: {exc}")


def _emit_document(response: DocumentResponse, out: str | None) -> None:
    click.echo(response.report, err=True, nl=False)
    if not response.ok:
        sys.exit(response.status)
    assert response.document is not None
    text = dumps(response.document)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)
    sys.exit(0)


def _parse_element(raw: str | None):
    if raw is None:
        return None
    stripped = raw.strip()
    if stripped.startswith("{"):
        try:
            parsed = json.loads(stripped)
        except json.JSONDecodeError as exc:
            _input_error(f"bad --element JSON: {exc}")
        if not isinstance(parsed, dict):
            _input_error("--element JSON must be an object of label -> rational")
        return {str(k): str(v) for k, v in parsed.items()}
    return stripped


@click.group()
@click.option("--server", metavar="URL", default=None, help="Send requests to a running service instead of computing in-process.")
@click.pass_context
def main(ctx: click.Context, server: str | None) -> None:
    """Exact verification of strong homotopy structures and derivations."""
    ctx.obj = Client(server)


@main.command()
@click.argument("path")
@click.option("--kind", type=click.Choice(["ainfty", "linfty", "sh-derivation"]), required=True)
@click.option("--max-arity", type=int, default=None, help="Override the document truncation (env: SHD_MAX_ARITY).")
@click.pass_obj
def verify(client: Client, path: str, kind: str, max_arity: int | None) -> None:
    """Check the structure (and derivation) relations of a document."""
    request = VerifyRequest(document=_load_document(path), kind=kind, max_arity=max_arity)
    response = client.call("verify", request)
    click.echo(response.report, nl=False)
    sys.exit(response.status)


@main.command()
@click.argument("path")
@click.option("--mode", type=click.Choice(["inner", "tautological", "reservoir"]), required=True)
@click.option("--element", default=None, help="Basis label or JSON object of label -> rational (inner mode).")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for the reservoir coderivation.")
@click.option("--xi-degree", type=int, default=0, show_default=True, help="Degree of the reservoir coderivation.")
@click.option("--max-arity", type=int, default=None)
@click.option("--out", default=None, metavar="PATH")
@click.pass_obj
def derive(client, path, mode, element, seed, xi_degree, max_arity, out) -> None:
    """Construct a verified strong homotopy derivation of a structure."""
    request = DeriveRequest(
        document=_load_document(path),
        mode=mode,
        element=_parse_element(element),
        seed=seed,
        xi_degree=xi_degree,
        max_arity=max_arity,
    )
    _emit_document(client.call("derive", request), out)


@main.command()
@click.argument("path")
@click.option("--max-arity", type=int, default=None)
@click.option("--out", default=None, metavar="PATH")
@click.pass_obj
def symmetrize(client, path, max_arity, out) -> None:
    """Symmetrize a verified associative-type document (plus its derivation)."""
    request = SymmetrizeRequest(document=_load_document(path), max_arity=max_arity)
    _emit_document(client.call("symmetrize", request), out)


@main.command()
@click.argument("path1")
@click.argument("path2")
@click.option("--max-arity", type=int, default=None)
@click.option("--out", default=None, metavar="PATH")
@click.pass_obj
def bracket(client, path1, path2, max_arity, out) -> None:
    """Bracket two verified derivations of the same structure."""
    request = BracketRequest(
        document1=_load_document(path1),
        document2=_load_document(path2),
        max_arity=max_arity,
    )
    _emit_document(client.call("bracket", request), out)


@main.command()
@click.option("--preset", type=click.Choice(["ass", "lie"]), required=True)
@click.option("--k", "ks", type=int, multiple=True, help="Derivation degree(s); default window -1..2.")
@click.option("--max-arity", type=int, default=None)
@click.option("--check-d2", "action", flag_value="check-d2", default=True)
@click.option("--print-diff", "arity", type=int, default=None, help="Print the differentials at this arity instead of scanning.")
@click.option("--format", "fmt", type=click.Choice(["text", "latex"]), default="text", show_default=True)
@click.pass_obj
def operad(client, preset, ks, max_arity, action, arity, fmt) -> None:
    """Symbolic resolution checks on the free-operad side."""
    request = OperadRequest(
        preset=preset,
        k=list(ks) or None,
        max_arity=max_arity,
        action="print-diff" if arity is not None else "check-d2",
        arity=arity,
        format=fmt,
    )
    response = client.call("operad", request)
    click.echo(response.report, nl=False)
    sys.exit(response.status)


@main.command()
@click.argument("name")
@click.option("--out", default=None, metavar="PATH")
@click.pass_obj
def fixture(client, name, out) -> None:
    """Emit a built-in example document (dual-numbers, exterior, solvable2)."""
    _emit_document(client.call("fixture", FixtureRequest(name=name)), out)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP service (requires uvicorn)."""
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
