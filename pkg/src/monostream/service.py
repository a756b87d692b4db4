"""HTTP/JSON API over the annotation store.

Error contract: 400 for protocol violations (bad tokens, malformed bodies,
out-of-range scores), 404 for unknown ids, 409 for illegal state transitions
(reading past the source, acting on a finished session, stale `expected_seq`).

Mutating endpoints accept an optional `expected_seq`, the event count the
client last saw; a mismatch means another writer got there first and is
rejected with 409 rather than silently interleaving two annotators.
"""

from __future__ import annotations

import io
import json
import os
import zipfile
from pathlib import Path
from typing import Any

from fastapi import Body, FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .annotation import SessionStore, ap_rate, per_rater_ap
from .core import serialize_stream_log
from .errors import IllegalTransitionError, UnknownSessionError

JOURNAL_DIR_ENV = "MONOSTREAM_JOURNAL_DIR"

# Fixed timestamp inside export archives so repeated exports are byte-identical.
_EPOCH = (1980, 1, 1, 0, 0, 0)


class CreateSessionRequest(BaseModel):
    source_tokens: list[str]


class ReadRequest(BaseModel):
    expected_seq: int | None = None


class WriteRequest(BaseModel):
    token: str
    expected_seq: int | None = None


class FinishRequest(BaseModel):
    expected_seq: int | None = None


class RatingRequest(BaseModel):
    item_id: str
    rater_id: str
    score: int


def build_export_archive(store: SessionStore) -> bytes:
    """Zip of the reference file and the stream-log file, byte-stable."""
    references, logs = store.export()
    ref_text = "".join(line + "\n" for line in references)
    log_text = "".join(serialize_stream_log(log) + "\n" for log in logs)
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", compression=zipfile.ZIP_STORED) as archive:
        for name, text in (("references.txt", ref_text), ("stream_logs.jsonl", log_text)):
            info = zipfile.ZipInfo(name, date_time=_EPOCH)
            archive.writestr(info, text.encode("utf-8"))
    return buf.getvalue()


def create_app(journal_dir: str | Path | None = None, static_dir: str | Path | None = None) -> FastAPI:
    """Build the service; journal_dir falls back to $MONOSTREAM_JOURNAL_DIR."""
    if journal_dir is None:
        journal_dir = os.environ.get(JOURNAL_DIR_ENV) or None
    store = SessionStore.load(journal_dir) if journal_dir is not None else SessionStore(None)

    app = FastAPI(title="monostream annotation service")
    app.state.store = store

    @app.exception_handler(ValueError)
    async def _bad_request(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def _invalid_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(UnknownSessionError)
    async def _not_found(request: Request, exc: UnknownSessionError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(IllegalTransitionError)
    async def _conflict(request: Request, exc: IllegalTransitionError):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.get("/healthz")
    def healthz() -> dict[str, str]:
        return {"status": "ok"}

    @app.post("/sessions")
    def create_session(body: CreateSessionRequest) -> dict[str, Any]:
        session = store.create_session(body.source_tokens)
        return session.visible_state()

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict[str, Any]:
        return store.get(session_id).visible_state()

    @app.post("/sessions/{session_id}/read")
    def read(session_id: str, body: ReadRequest | None = Body(default=None)) -> dict[str, Any]:
        expected = body.expected_seq if body else None
        token = store.act_read(session_id, expected_seq=expected)
        state = store.get(session_id).visible_state()
        state["exposed_token"] = token
        return state

    @app.post("/sessions/{session_id}/write")
    def write(session_id: str, body: WriteRequest) -> dict[str, Any]:
        store.act_write(session_id, body.token, expected_seq=body.expected_seq)
        return store.get(session_id).visible_state()

    @app.post("/sessions/{session_id}/finish")
    def finish(session_id: str, body: FinishRequest | None = Body(default=None)) -> dict[str, Any]:
        expected = body.expected_seq if body else None
        log = store.finish_session(session_id, expected_seq=expected)
        return json.loads(serialize_stream_log(log))

    @app.post("/ratings")
    def submit_rating(body: RatingRequest) -> dict[str, Any]:
        record = store.submit_rating(body.item_id, body.rater_id, body.score)
        return {"item_id": record.item_id, "rater_id": record.rater_id, "score": record.score}

    @app.get("/ratings/ap")
    def ratings_ap(threshold: int = 3) -> dict[str, Any]:
        records = store.ratings()
        return {
            "threshold": threshold,
            "items": len({r.item_id for r in records}),
            "ap": ap_rate(records, threshold),
            "per_rater": per_rater_ap(records, threshold),
        }

    @app.get("/export")
    def export() -> Response:
        payload = build_export_archive(store)
        return Response(
            content=payload,
            media_type="application/zip",
            headers={"Content-Disposition": 'attachment; filename="annotations.zip"'},
        )

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
