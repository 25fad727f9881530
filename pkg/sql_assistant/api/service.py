"""HTTP facade: POST /api/check runs the single-query pipeline."""

from __future__ import annotations

import json
from dataclasses import replace
from typing import Any, Literal, Optional

from fastapi import APIRouter, FastAPI, Request
from fastapi.concurrency import run_in_threadpool
from fastapi.responses import Response
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from sql_assistant import __version__
from sql_assistant.exception.custom_exception import ConfigError, SqlSenseException
from sql_assistant.logger import GLOBAL_LOGGER as log
from sql_assistant.ranking.ranker import InterQueryMode, RankingConfig
from sql_assistant.report.reporter import emit_report
from sql_assistant.utils.settings_loader import Settings, SettingsLoader
from sql_assistant.workflow.pipeline import find_anti_patterns


class CheckConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    preset: Optional[str] = None
    inter_query_mode: Optional[Literal["count", "score"]] = None
    weights: Optional[dict[str, float]] = None


class CheckRequest(BaseModel):
    query: str = Field(...)
    config: Optional[CheckConfig] = None


class BadRequest(SqlSenseException):
    """Request body is not a JSON object with a ``query`` string."""


def parse_request(raw: bytes) -> CheckRequest:
    try:
        body = json.loads(raw.decode("utf-8")) if raw else None
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise BadRequest(f"malformed JSON: {e}", e) from e
    if not isinstance(body, dict):
        raise BadRequest("request body must be a JSON object")
    if "query" not in body:
        raise BadRequest("missing field: query")
    try:
        return CheckRequest.model_validate(body)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first["loc"])
        raise BadRequest(f"invalid field: {where}: {first['msg']}", e) from e


def settings_for(base: Settings, config: Optional[CheckConfig]) -> Settings:
    if config is None:
        return base
    mode = InterQueryMode(config.inter_query_mode) if config.inter_query_mode else base.ranking_config.inter_query_mode
    if config.weights is not None:
        ranking = RankingConfig.from_weights(config.weights, mode, preset="custom")
    elif config.preset is not None:
        ranking = RankingConfig.from_preset(config.preset, mode)
    else:
        ranking = replace(base.ranking_config, inter_query_mode=mode)
    return replace(base, ranking_config=ranking)


def handle_check(raw: bytes, base: Settings) -> tuple[int, bytes]:
    """
    Process one /api/check body.

    Returns:
        tuple[int, bytes]: HTTP status and the response body. A 200 body is the same JSON
        report the CLI prints; a 400 body is ``{"error": <message>}``.
    """
    try:
        request = parse_request(raw)
        settings = settings_for(base, request.config)
    except (BadRequest, ConfigError) as e:
        log.warning("Rejected check request", error=e.error_message)
        return 400, json.dumps({"error": e.error_message}).encode("utf-8")
    result = find_anti_patterns(request.query, settings=settings, origin="request")
    return 200, emit_report(result, "json")


def build_router(settings: Settings) -> APIRouter:
    router = APIRouter()

    @router.post("/api/check")
    async def check(request: Request) -> Response:
        status, body = await run_in_threadpool(handle_check, await request.body(), settings)
        return Response(content=body, status_code=status, media_type="application/json")

    @router.get("/health")
    async def health() -> dict[str, Any]:
        return {"status": "ok", "version": __version__}

    return router


def create_app(settings: Optional[Settings] = None) -> FastAPI:
    settings = settings or SettingsLoader().load()
    app = FastAPI(title="sql-sense", version=__version__)
    app.include_router(build_router(settings))
    log.info("REST service ready", preset=settings.preset)
    return app
