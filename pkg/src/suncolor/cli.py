"""Command-line front end: a thin client over the service layer.

Every subcommand builds the same pydantic request model the HTTP service
accepts and either calls the shared handler in-process (default) or posts it
to a running service (``--server``).  JSON output is the stable machine
interface; text output is human-oriented.

Exit codes: 0 success, 2 parse error, 3 resource-cap error, 4 internal
verification failure (including an oracle disagreement).
"""

from __future__ import annotations

import json
import pathlib
import sys

import click

from .errors import (
    ConnectorNotFoundError,
    EngineError,
    ParseError,
    PoleError,
    ResourceLimitError,
    VerificationError,
)
from .service import handlers
from .service import models as m

EXIT_PARSE = 2
EXIT_RESOURCE = 3
EXIT_VERIFY = 4

_ROUTES = {
    "simplify": (m.SimplifyRequest, m.SimplifyResponse, handlers.handle_simplify),
    "inner": (m.InnerRequest, m.InnerResponse, handlers.handle_inner),
    "gram": (m.GramRequest, m.GramResponse, handlers.handle_gram),
    "basis": (m.BasisRequest, m.BasisResponse, handlers.handle_basis),
    "dims": (m.DimsRequest, m.DimsResponse, handlers.handle_dims),
    "tableaux": (m.TableauxRequest, m.TableauxResponse, handlers.handle_tableaux),
    "oracle": (m.OracleRequest, m.OracleResponse, handlers.handle_oracle),
    "vec3": (m.Vec3Request, m.Vec3Response, handlers.handle_vec3),
}


def _dispatch(ctx: click.Context, route: str, request):
    server = ctx.obj.get("server")
    _req_model, resp_model, handler = _ROUTES[route]
    if not server:
        try:
            return handler(request)
        except (ParseError, PoleError) as exc:
            _fail(EXIT_PARSE, f"parse error: {exc}")
        except ResourceLimitError as exc:
            _fail(EXIT_RESOURCE, f"resource limit: {exc}")
        except (VerificationError, ConnectorNotFoundError, EngineError) as exc:
            _fail(EXIT_VERIFY, f"engine error: {exc}")
        except ValueError as exc:
            _fail(EXIT_PARSE, f"bad argument: {exc}")
    import httpx

    reply = httpx.post(
        server.rstrip("/") + f"/{route}",
        json=json.loads(request.model_dump_json()),
        timeout=600.0,
    )
    if reply.status_code == 200:
        return resp_model.model_validate(reply.json())
    kind = reply.json().get("kind", "internal") if reply.headers.get(
        "content-type", ""
    ).startswith("application/json") else "internal"
    code = {"parse": EXIT_PARSE, "resource": EXIT_RESOURCE}.get(kind, EXIT_VERIFY)
    if reply.status_code == 422:
        code = EXIT_PARSE
    _fail(code, f"server error {reply.status_code}: {reply.text}")


def _fail(code: int, message: str):
    click.echo(message, err=True)
    sys.exit(code)


def _emit(ctx: click.Context, response, text_renderer):
    if ctx.obj["format"] == "json":
        click.echo(response.model_dump_json(by_alias=True))
    else:
        text_renderer(response)


def _read_arg(value: str) -> str:
    """Expression arguments starting with '@' are read from a UTF-8 file."""
    if value.startswith("@"):
        return pathlib.Path(value[1:]).read_text(encoding="utf-8")
    return value


@click.group()
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.option("--server", default=None, help="Base URL of a running service; default is in-process.")
@click.option("--cap-terms", type=int, default=None, help="Intermediate term cap.")
@click.option("--cap-degree", type=int, default=None, help="Bar width / expansion degree cap.")
@click.pass_context
def main(ctx, fmt, server, cap_terms, cap_degree):
    """Exact SU(N) colour algebra in trace-basis normal form."""
    ctx.ensure_object(dict)
    ctx.obj.update(format=fmt, server=server, cap_terms=cap_terms, cap_degree=cap_degree)


def _caps(ctx) -> dict:
    return {"cap_terms": ctx.obj["cap_terms"], "cap_degree": ctx.obj["cap_degree"]}


@main.command()
@click.argument("expression")
@click.pass_context
def simplify(ctx, expression):
    """Reduce a DSL expression to trace-basis normal form."""
    req = m.SimplifyRequest(expression=_read_arg(expression), **_caps(ctx))
    resp = _dispatch(ctx, "simplify", req)

    def text(r):
        click.echo(r.dsl)

    _emit(ctx, resp, text)


@main.command()
@click.argument("left")
@click.argument("right")
@click.option("--N", "n", type=int, default=None, help="Evaluate the result at this N.")
@click.option("--TR", "tr", default=None, help="T_R value for evaluation (rational).")
@click.pass_context
def inner(ctx, left, right, n, tr):
    """Scalar product of two expressions."""
    req = m.InnerRequest(
        left=_read_arg(left), right=_read_arg(right), n=n, tr=tr, **_caps(ctx)
    )
    resp = _dispatch(ctx, "inner", req)

    def text(r):
        click.echo(r.value)
        if r.value_at_point is not None:
            click.echo(f"at point: {r.value_at_point}")

    _emit(ctx, resp, text)


@main.command()
@click.argument("basis_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--verify", is_flag=True, help="Also run the exact basis verification.")
@click.option("--complete", is_flag=True, help="Expect the projectors to sum to the identity.")
@click.pass_context
def gram(ctx, basis_file, verify, complete):
    """Gram matrix of a basis JSON file."""
    data = json.loads(pathlib.Path(basis_file).read_text(encoding="utf-8"))
    vectors = [m.BasisVectorModel(**v) for v in data["vectors"]]
    req = m.GramRequest(
        vectors=vectors, verify=verify, expect_complete=complete, **_caps(ctx)
    )
    resp = _dispatch(ctx, "gram", req)

    def text(r):
        width = max(len(x) for row in r.gram for x in row)
        for label, row in zip(r.labels, r.gram):
            click.echo(f"{label}: " + "  ".join(x.rjust(width) for x in row))
        if r.report is not None:
            click.echo(f"verification passed: {r.report['passed']}")

    _emit(ctx, resp, text)


@main.command()
@click.argument("kind", type=click.Choice(["trace", "quark", "gluon-aa"]))
@click.option("--nq", type=int, default=0, help="Quark-pair count for the trace basis.")
@click.option("--ng", type=int, default=0, help="Gluon count for the trace basis.")
@click.option("--verify", is_flag=True)
@click.pass_context
def basis(ctx, kind, nq, ng, verify):
    """Emit a trace / quark / gluon-AA multiplet basis as JSON vectors."""
    req = m.BasisRequest(kind=kind, n_q=nq, n_g=ng, verify=verify, **_caps(ctx))
    resp = _dispatch(ctx, "basis", req)

    def text(r):
        for v in r.vectors:
            dim = f", dim = {v.dimension}" if v.dimension else ""
            click.echo(f"{v.label} [{v.kind}] norm_sq = {v.norm_sq}{dim}")
            click.echo(f"  {v.dsl_text}")
        if r.report is not None:
            click.echo(f"verification passed: {r.report['passed']}")

    _emit(ctx, resp, text)


@main.command()
@click.option("--n", "power", type=int, required=True, help="Adjoint tensor power.")
@click.option("--N", "n_colours", default="large", help="Number of colours or 'large'.")
@click.pass_context
def dims(ctx, power, n_colours):
    """Adjoint-power decomposition: multiplet count and colour-space dimension."""
    n_val = "large" if n_colours == "large" else int(n_colours)
    req = m.DimsRequest(power=power, n=n_val)
    resp = _dispatch(ctx, "dims", req)

    def text(r):
        click.echo(f"multiplets: {r.multiplets}, colour-space dim: {r.colour_space_dimension}")
        for e in r.decomposition:
            click.echo(f"  {e.diagram} x{e.multiplicity} (dim {e.dimension})")

    _emit(ctx, resp, text)


@main.command()
@click.option("--n", type=int, required=True, help="Number of boxes.")
@click.pass_context
def tableaux(ctx, n):
    """Enumerate standard Young tableaux with hook products and dimensions."""
    req = m.TableauxRequest(n=n)
    resp = _dispatch(ctx, "tableaux", req)

    def text(r):
        click.echo(f"{r.count} standard tableaux with {r.n} boxes")
        for e in r.tableaux:
            click.echo(
                f"  {e.tableau} shape {e.shape} hook product {e.hook_product} "
                f"dim {e.sun_dimension}"
            )

    _emit(ctx, resp, text)


@main.command()
@click.argument("expression")
@click.option("--N", "n", type=int, default=3)
@click.option("--TR", "tr", default="1/2")
@click.pass_context
def oracle(ctx, expression, n, tr):
    """Numeric cross-check of an expression against its normal form."""
    req = m.OracleRequest(expression=_read_arg(expression), n=n, tr=tr, **_caps(ctx))
    resp = _dispatch(ctx, "oracle", req)

    def text(r):
        status = "agree" if r.ok else "DISAGREE"
        click.echo(
            f"{status}: max abs {r.max_abs_deviation:.3e}, "
            f"max rel {r.max_rel_deviation:.3e}"
        )

    _emit(ctx, resp, text)
    if not resp.ok:
        sys.exit(EXIT_VERIFY)


@main.command()
@click.argument("expression")
@click.pass_context
def vec3(ctx, expression):
    """Reduce an epsilon-delta expression over three-dimensional indices."""
    req = m.Vec3Request(expression=_read_arg(expression))
    resp = _dispatch(ctx, "vec3", req)

    def text(r):
        click.echo(r.reduced)

    _emit(ctx, resp, text)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("suncolor.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
