"""HTTP surface over the pipeline.

All state lives in the project store, so the server can be restarted at
any point without losing work.  Runs exceed request timescales, so POST
/projects/{id}/run answers 202 and clients poll GET /projects/{id}/result.

Error bodies are uniform: {"code", "message", "detail"} where code is one
of validation | state | eligibility | schema | not_found | internal.
Optional single-token bearer auth comes from the RETTA_TOKEN environment
variable (demo-grade; not meant for production exposure).
"""

from __future__ import annotations

import os

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import pipeline as pl
from .errors import RettaError, SchemaError, ValidationError
from .registry import context_schema

TOKEN_ENV_VAR = "RETTA_TOKEN"

_STATUS_BY_CODE = {
    "validation": 400,
    "state": 409,
    "eligibility": 409,
    "schema": 422,
    "not_found": 404,
    "internal": 500,
}


def _error_response(code: str, message: str, detail: dict | None = None) -> JSONResponse:
    return JSONResponse(
        status_code=_STATUS_BY_CODE[code],
        content={"code": code, "message": message, "detail": detail or {}},
    )


def _service_to_dict(svc) -> dict:
    return {
        "id": svc.id,
        "display_name": svc.display_name,
        "required_source_kinds": sorted(svc.required_source_kinds),
        "optional_source_kinds": sorted(svc.optional_source_kinds),
        "min_documents": svc.min_documents,
    }


def _field_to_dict(fd) -> dict:
    return {"name": fd.name, "value_kind": fd.value_kind, "required": fd.required}


def create_app(pipeline: pl.Pipeline, auth_token: str | None = None, cors_origin: str | None = None) -> FastAPI:
    app = FastAPI(title="retta gateway", docs_url=None, redoc_url=None)
    token = auth_token if auth_token is not None else os.environ.get(TOKEN_ENV_VAR)

    if cors_origin:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=[cors_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.middleware("http")
    async def check_token(request: Request, call_next):
        if token and request.headers.get("authorization") != f"Bearer {token}":
            return _error_response("validation", "missing or bad bearer token")
        return await call_next(request)

    @app.exception_handler(RettaError)
    async def handle_domain_error(request: Request, exc: RettaError):
        detail = {}
        if isinstance(exc, SchemaError):
            detail = {"field": exc.field, "source": exc.source}
        return _error_response(exc.api_code, str(exc), detail)

    @app.exception_handler(Exception)
    async def handle_internal_error(request: Request, exc: Exception):
        return _error_response("internal", str(exc))

    def load(project_id: str) -> pl.Project:
        return pipeline.load_project(project_id)

    @app.post("/projects", status_code=201)
    async def create_project(body: dict):
        try:
            region = pl.region_from_dict(body.get("region", body))
        except (TypeError, KeyError) as exc:
            raise ValidationError(f"bad region: {exc}")
        project = pipeline.create_project(region)
        eligible = pipeline.eligible_services(project)
        return {
            "project": pl.project_to_dict(project),
            "eligible_services": [_service_to_dict(s) for s in eligible],
        }

    @app.get("/projects/{project_id}")
    async def get_project(project_id: str):
        return {"project": pl.project_to_dict(load(project_id))}

    @app.post("/projects/{project_id}/service")
    async def select_service(project_id: str, body: dict):
        if "service_id" not in body:
            raise ValidationError("service_id required")
        project = pipeline.select_service(load(project_id), body["service_id"])
        return {"project": pl.project_to_dict(project)}

    @app.get("/projects/{project_id}/sources")
    async def list_sources(project_id: str):
        project = load(project_id)
        sources = pipeline.available_sources(project)
        return {
            "sources": [
                {
                    "kind": src.kind,
                    "display_name": src.display_name,
                    "context_schema": [
                        _field_to_dict(fd) for fd in context_schema(pipeline.catalog, src.kind)
                    ],
                }
                for src in sources
            ]
        }

    @app.post("/projects/{project_id}/context")
    async def set_context(project_id: str, body: dict):
        sources = body.get("sources", [])
        try:
            contexts = {
                kind: pl.context_from_dict(ctx)
                for kind, ctx in body.get("contexts", {}).items()
            }
        except (TypeError, KeyError) as exc:
            raise ValidationError(f"bad context: {exc}")
        project = pipeline.set_sources_and_context(load(project_id), sources, contexts)
        return {"project": pl.project_to_dict(project)}

    @app.post("/projects/{project_id}/run", status_code=202)
    async def run(project_id: str, body: dict | None = None):
        body = body or {}
        project = load(project_id)
        config = pipeline.default_run_config
        if body.get("run_config"):
            config = pl.RunConfig.from_dict({**config.to_dict(), **body["run_config"]})
        # raises StateError synchronously when the project cannot run;
        # a 202 therefore means the Running state is already persisted
        pipeline.run_async(project, config, reset=bool(body.get("reset", False)))
        return {"project_id": project_id, "state": "Running"}

    @app.get("/projects/{project_id}/result")
    async def get_result(project_id: str):
        project = load(project_id)
        if project.state == "Failed":
            return JSONResponse(
                status_code=409,
                content={
                    "code": "state",
                    "message": f"run failed: {project.failure_reason}",
                    "detail": {"state": "Failed"},
                },
            )
        if project.state != "Complete":
            return JSONResponse(
                status_code=409,
                content={
                    "code": "state",
                    "message": f"no result yet (state {project.state})",
                    "detail": {"state": project.state},
                },
            )
        return {
            "result": pipeline.store.load_result(project_id),
            "timings": pipeline.store.load_timings(project_id),
        }

    @app.exception_handler(404)
    async def handle_404(request: Request, exc):
        return _error_response("not_found", "unknown route")

    return app
