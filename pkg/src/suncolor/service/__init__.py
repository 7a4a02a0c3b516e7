"""FastAPI service wrapping the colour-algebra engine.

Run with ``suncolor serve`` or ``uvicorn suncolor.service:app``.  Every
endpoint is a POST with a pydantic request/response body; engine errors map
to structured error payloads (400 parse, 413 resource cap, 500 internal)."""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from ..errors import (
    ConnectorNotFoundError,
    EngineError,
    ParseError,
    PoleError,
    ResourceLimitError,
    VerificationError,
)
from . import handlers
from . import models as m


def _error_response(status: int, kind: str, exc: Exception) -> JSONResponse:
    body = m.ErrorBody(kind=kind, message=str(exc))
    return JSONResponse(status_code=status, content=body.model_dump())


def create_app() -> FastAPI:
    app = FastAPI(
        title="suncolor",
        description="Exact SU(N) colour algebra: trace-basis normal forms, "
        "Young operators, multiplet bases and a numeric oracle.",
        version="0.1.0",
    )

    @app.exception_handler(ParseError)
    async def _parse_error(_req, exc):
        return _error_response(400, "parse", exc)

    @app.exception_handler(PoleError)
    async def _pole_error(_req, exc):
        return _error_response(400, "parse", exc)

    @app.exception_handler(ResourceLimitError)
    async def _resource_error(_req, exc):
        return _error_response(413, "resource", exc)

    @app.exception_handler(VerificationError)
    async def _verification_error(_req, exc):
        return _error_response(500, "verification", exc)

    @app.exception_handler(ConnectorNotFoundError)
    async def _connector_error(_req, exc):
        return _error_response(500, "verification", exc)

    @app.exception_handler(EngineError)
    async def _engine_error(_req, exc):
        return _error_response(500, "internal", exc)

    @app.exception_handler(ValueError)
    async def _value_error(_req, exc):
        # bad argument values (e.g. an empty basis request) are client errors
        return _error_response(400, "parse", exc)

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/simplify", response_model=m.SimplifyResponse)
    def simplify(req: m.SimplifyRequest):
        return handlers.handle_simplify(req)

    @app.post("/inner", response_model=m.InnerResponse)
    def inner(req: m.InnerRequest):
        return handlers.handle_inner(req)

    @app.post("/gram", response_model=m.GramResponse)
    def gram(req: m.GramRequest):
        return handlers.handle_gram(req)

    @app.post("/basis", response_model=m.BasisResponse)
    def basis(req: m.BasisRequest):
        return handlers.handle_basis(req)

    @app.post("/dims", response_model=m.DimsResponse)
    def dims(req: m.DimsRequest):
        return handlers.handle_dims(req)

    @app.post("/tableaux", response_model=m.TableauxResponse)
    def tableaux(req: m.TableauxRequest):
        return handlers.handle_tableaux(req)

    @app.post("/oracle", response_model=m.OracleResponse)
    def oracle(req: m.OracleRequest):
        return handlers.handle_oracle(req)

    @app.post("/vec3", response_model=m.Vec3Response)
    def vec3(req: m.Vec3Request):
        return handlers.handle_vec3(req)

    return app


app = create_app()
