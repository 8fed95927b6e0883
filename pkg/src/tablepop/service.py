"""HTTP suggestion service over an immutable index/KB snapshot.

Endpoints: ``POST /suggest/rows``, ``POST /suggest/columns``,
``GET /health``, ``GET /snapshot``, and ``POST /admin/reload``.  Requests
carry the same seed-table JSON as the CLI.  Responses are pure functions of
(snapshot, request) apart from the timing field.

Suggestions are recomputed per request; there is no per-session state.
Snapshot replacement is an atomic swap guarded by a lock, so concurrent
requests always see exactly one consistent snapshot.
"""

from __future__ import annotations

import dataclasses
import logging
import threading
import time
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .columns import ColumnCandidateConfig, ColumnRankingConfig, rank_columns
from .index import TableIndex, load_index
from .kb import KbStore, load_kb
from .rows import RowCandidateConfig, RowRankingConfig, rank_rows
from .tables import SeedTable

logger = logging.getLogger(__name__)

ROW_COMPONENT_ALIASES = {
    "esim": "entity_similarity",
    "entity_similarity": "entity_similarity",
    "label": "label_likelihood",
    "label_likelihood": "label_likelihood",
    "caption": "caption_likelihood",
    "caption_likelihood": "caption_likelihood",
}
COLUMN_COMPONENT_ALIASES = {
    "caption": "caption",
    "labels": "labels",
    "entities": "entities",
}


@dataclasses.dataclass
class Snapshot:
    index: TableIndex
    kb: KbStore
    version: str

    @property
    def manifest(self) -> dict:
        return self.index.manifest


def open_kb_path(path: str | Path) -> KbStore:
    """Load a KB dump from a file, or from ``kb.ndjson`` inside a directory."""
    p = Path(path)
    if p.is_dir():
        p = p / "kb.ndjson"
    with open(p, "rb") as fh:
        return load_kb(fh)


def load_snapshot(index_dir: str | Path, kb_path: str | Path) -> Snapshot:
    index = load_index(index_dir)
    kb = open_kb_path(kb_path)
    return Snapshot(index=index, kb=kb, version=index.version)


class SuggestRequest(BaseModel):
    caption: str = ""
    entities: list[str] = Field(default_factory=list)
    labels: list[str] = Field(default_factory=list)
    task: Literal["rows", "columns"] | None = None
    top_k: int = Field(100, ge=1, le=500)
    components: list[str] | None = None
    lambda_e: float | None = Field(None, ge=0.0, le=1.0)
    lambda_l: float | None = Field(None, ge=0.0, le=1.0)
    lambda_c: float | None = Field(None, ge=0.0, le=1.0)
    kb_similarity: Literal["relations", "wlm", "jaccard"] | None = None
    baseline: Literal["acsdb"] | None = None


def _canonical_components(names: list[str], aliases: dict[str, str]) -> frozenset[str]:
    out = set()
    for name in names:
        canonical = aliases.get(name)
        if canonical is None:
            raise HTTPException(status_code=422, detail=f"unknown component {name!r}")
        out.add(canonical)
    return frozenset(out)


def _seed_from_request(req: SuggestRequest) -> SeedTable:
    try:
        return SeedTable(
            caption=req.caption, entities=tuple(req.entities), labels=tuple(req.labels)
        )
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


class _SnapshotHolder:
    def __init__(self, snapshot: Snapshot | None):
        self._lock = threading.Lock()
        self.current = snapshot
        self.loading_manifest: dict | None = None

    def swap(self, snapshot: Snapshot) -> None:
        with self._lock:
            self.current = snapshot
            self.loading_manifest = None


def create_app(
    index_dir: str | Path | None = None,
    kb_path: str | Path | None = None,
    *,
    snapshot: Snapshot | None = None,
    top_k_cap: int = 500,
    cors_origins: tuple[str, ...] = (),
) -> FastAPI:
    """Build the service app, loading a snapshot from the given paths unless
    one is supplied directly."""
    if snapshot is None and index_dir is not None and kb_path is not None:
        snapshot = load_snapshot(index_dir, kb_path)
    app = FastAPI(title="tablepop", version="0.1.0")
    holder = _SnapshotHolder(snapshot)
    app.state.holder = holder
    app.state.index_dir = str(index_dir) if index_dir is not None else None
    app.state.kb_path = str(kb_path) if kb_path is not None else None
    app.state.top_k_cap = top_k_cap
    if cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(request: Request, exc: RequestValidationError):
        # Undecodable body is a malformed payload (400); field-level
        # violations are semantic errors (422).
        if any(e.get("type") == "json_invalid" for e in exc.errors()):
            return JSONResponse(status_code=400, content={"detail": "malformed JSON payload"})
        return JSONResponse(status_code=422, content={"detail": exc.errors()})

    def _snapshot_or_503() -> Snapshot:
        snap = holder.current
        if snap is None:
            raise HTTPException(status_code=503, detail="snapshot loading")
        return snap

    def _check_top_k(req: SuggestRequest) -> None:
        if req.top_k > app.state.top_k_cap:
            raise HTTPException(
                status_code=422,
                detail=f"top_k {req.top_k} exceeds cap {app.state.top_k_cap}",
            )

    @app.post("/suggest/rows")
    def suggest_rows(req: SuggestRequest) -> dict:
        if req.task not in (None, "rows"):
            raise HTTPException(status_code=422, detail="task does not match endpoint")
        _check_top_k(req)
        snap = _snapshot_or_503()
        seed = _seed_from_request(req)
        overrides: dict = {}
        if req.components is not None:
            overrides["components"] = _canonical_components(
                req.components, ROW_COMPONENT_ALIASES
            )
        if req.lambda_e is not None:
            overrides["lambda_e"] = req.lambda_e
        if req.lambda_l is not None:
            overrides["lambda_l"] = req.lambda_l
        if req.lambda_c is not None:
            overrides["lambda_c"] = req.lambda_c
        if req.kb_similarity is not None:
            overrides["kb_similarity"] = req.kb_similarity
        rank_cfg = RowRankingConfig(**overrides)
        started = time.perf_counter()
        suggestions = rank_rows(
            seed, RowCandidateConfig(), rank_cfg, index=snap.index, kb=snap.kb
        )[: req.top_k]
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        return {
            "task": "rows",
            "suggestions": [
                {"key": s.key, "score": s.score, "components": dict(s.components)}
                for s in suggestions
            ],
            "timing_ms": elapsed_ms,
            "snapshot_version": snap.version,
        }

    @app.post("/suggest/columns")
    def suggest_columns(req: SuggestRequest) -> dict:
        if req.task not in (None, "columns"):
            raise HTTPException(status_code=422, detail="task does not match endpoint")
        _check_top_k(req)
        snap = _snapshot_or_503()
        seed = _seed_from_request(req)
        overrides: dict = {"baseline": req.baseline}
        if req.components is not None:
            overrides["components"] = _canonical_components(
                req.components, COLUMN_COMPONENT_ALIASES
            )
        rank_cfg = ColumnRankingConfig(**overrides)
        started = time.perf_counter()
        suggestions = rank_columns(
            seed, ColumnCandidateConfig(), rank_cfg, index=snap.index
        )[: req.top_k]
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        return {
            "task": "columns",
            "suggestions": [
                {"key": s.key, "score": s.score, "components": dict(s.components)}
                for s in suggestions
            ],
            "timing_ms": elapsed_ms,
            "snapshot_version": snap.version,
        }

    @app.get("/health")
    def health() -> dict:
        snap = holder.current
        return {
            "status": "ok",
            "snapshot_version": snap.version if snap is not None else None,
        }

    @app.get("/snapshot")
    def snapshot_info() -> dict:
        snap = holder.current
        return {
            "current": (
                {"version": snap.version, "manifest": snap.manifest}
                if snap is not None
                else None
            ),
            "loading": holder.loading_manifest,
        }

    @app.post("/admin/reload")
    def reload_snapshot() -> dict:
        if app.state.index_dir is None or app.state.kb_path is None:
            raise HTTPException(status_code=409, detail="service not backed by on-disk snapshot")
        if holder.loading_manifest is not None:
            raise HTTPException(status_code=409, detail="reload already in progress")
        holder.loading_manifest = {"index_dir": app.state.index_dir}

        def _reload() -> None:
            try:
                fresh = load_snapshot(app.state.index_dir, app.state.kb_path)
                holder.swap(fresh)
            except Exception:
                logger.exception("snapshot reload failed")
                holder.loading_manifest = None

        threading.Thread(target=_reload, daemon=True).start()
        return {"status": "reloading"}

    return app
