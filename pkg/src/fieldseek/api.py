"""HTTP service exposing sessions, question generation, exploration jobs,
themes, linked-paper browsing, collection edits, and outline export.

The service is single-process: session states are cached in memory and
written through to the store on every mutation, with a per-session lock
serializing writers (request handlers and job threads alike).
Explorations run on a small thread pool and report a pollable job status.
"""
from __future__ import annotations

import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Optional
from uuid import uuid4

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from . import export as export_mod
from . import pipeline
from .errors import (
    CorruptState,
    EmptyTopic,
    FieldseekError,
    FixtureMissing,
    MalformedResponse,
    NetworkError,
    NotFound,
    PreconditionFailed,
    ProviderError,
    RateLimited,
    UnknownEntity,
    UnparseableCompletion,
)
from .pipeline import Services
from .questions import EqDraft, validate_question
from .session import SessionState, SessionStore

API_PREFIX = "/api/v1"
JOB_STAGES = ("queued", "expanding", "searching", "theming", "done", "failed")
DEFAULT_BIND = "127.0.0.1:8080"


class TopicIn(BaseModel):
    topic: str


class GenerateIn(BaseModel):
    mode: Literal["topic", "paper"] = "topic"
    paper_id: Optional[str] = None
    focus_keywords: list[str] = Field(default_factory=list)
    max_fields: Optional[int] = Field(default=None, ge=1, le=12)


class EqPatch(BaseModel):
    text: Optional[str] = None
    selected: Optional[bool] = None


class ManualEqIn(BaseModel):
    text: str
    discipline: str


class EditsIn(BaseModel):
    edits: list[dict]


@dataclass
class JobRecord:
    job_id: str
    session_id: str
    eq_id: str
    status: str = "queued"
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "eq_id": self.eq_id,
            "status": self.status,
            "error": self.error,
        }


@dataclass
class AppContext:
    services: Services
    store: SessionStore
    executor: ThreadPoolExecutor
    states: dict[str, SessionState] = field(default_factory=dict)
    jobs: dict[str, JobRecord] = field(default_factory=dict)
    active_eq_jobs: set[tuple[str, str]] = field(default_factory=set)
    jobs_lock: threading.Lock = field(default_factory=threading.Lock)
    job_counter: int = 0

    def get_state(self, session_id: str) -> SessionState:
        if session_id not in self.states:
            self.states[session_id] = self.store.load(session_id)
        return self.states[session_id]

    def save(self, state: SessionState) -> None:
        self.store.save(state)

    def new_job(self, session_id: str, eq_id: str) -> JobRecord:
        with self.jobs_lock:
            if (session_id, eq_id) in self.active_eq_jobs:
                raise PreconditionFailed(f"question {eq_id} is already being explored")
            self.job_counter += 1
            job = JobRecord(job_id=f"job-{self.job_counter}", session_id=session_id, eq_id=eq_id)
            self.jobs[job.job_id] = job
            self.active_eq_jobs.add((session_id, eq_id))
            return job

    def finish_job(self, job: JobRecord, status: str, error: str | None = None) -> None:
        with self.jobs_lock:
            job.status = status
            job.error = error
            self.active_eq_jobs.discard((job.session_id, job.eq_id))


_STATUS_BY_ERROR = (
    (NotFound, 404),
    (UnknownEntity, 404),
    (EmptyTopic, 400),
    (PreconditionFailed, 409),
    (FixtureMissing, 502),
    (ProviderError, 502),
    (NetworkError, 502),
    (RateLimited, 502),
    (MalformedResponse, 502),
    (UnparseableCompletion, 502),
    (CorruptState, 500),
)


def _status_for(exc: Exception) -> int:
    for error_type, status in _STATUS_BY_ERROR:
        if isinstance(exc, error_type):
            return status
    return 500


def _theme_payload(state: SessionState, eq_id: str) -> dict:
    exploration = state.get_exploration(eq_id)

    def paper_entry(paper_id: str) -> dict:
        paper = state.papers[paper_id]
        annotation = exploration.annotations.get(paper_id)
        entry = paper.to_dict()
        entry["annotation"] = annotation.to_dict() if annotation else None
        return entry

    return {
        "eq_id": eq_id,
        "queries": list(exploration.expansion.queries),
        "themes": [
            {
                "theme_id": theme.theme_id,
                "title": theme.title,
                "papers": [paper_entry(pid) for pid in theme.paper_ids],
            }
            for theme in exploration.theme_set.themes
        ],
        "possibly_relevant": [
            paper_entry(pid) for pid in exploration.theme_set.possibly_relevant
        ],
    }


def create_app(
    services: Services | None = None,
    store: SessionStore | None = None,
    max_workers: int = 4,
) -> FastAPI:
    services = services or Services.from_env()
    store = store or SessionStore(os.environ.get("DATA_DIR", "./data"))
    ctx = AppContext(
        services=services,
        store=store,
        executor=ThreadPoolExecutor(max_workers=max_workers, thread_name_prefix="explore"),
    )
    app = FastAPI(title="fieldseek", docs_url=None, redoc_url=None)
    app.state.ctx = ctx

    @app.exception_handler(FieldseekError)
    async def domain_error(request: Request, exc: FieldseekError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.exception_handler(ValueError)
    async def value_error(request: Request, exc: ValueError):
        return JSONResponse(
            status_code=400, content={"error": "ValueError", "detail": str(exc)}
        )

    @app.get(API_PREFIX + "/health")
    def health():
        return {"status": "ok"}

    @app.post(API_PREFIX + "/sessions", status_code=201)
    def create_session(body: TopicIn):
        state = SessionState.create(session_id=uuid4().hex, topic_text=body.topic)
        ctx.states[state.session_id] = state
        ctx.save(state)
        return {
            "session_id": state.session_id,
            "topic": state.topic.text,
            "concepts": list(state.topic.concepts),
        }

    @app.get(API_PREFIX + "/sessions/{session_id}")
    def get_session(session_id: str):
        state = ctx.get_state(session_id)
        with ctx.store.lock_for(session_id):
            return state.to_dict()

    @app.post(API_PREFIX + "/sessions/{session_id}/eqs/generate")
    def generate_eqs(session_id: str, body: GenerateIn):
        state = ctx.get_state(session_id)
        with ctx.store.lock_for(session_id):
            if body.mode == "paper":
                if not body.paper_id:
                    raise ValueError("mode=paper requires paper_id")
                added = pipeline.generate_paper_questions(
                    state,
                    ctx.services,
                    body.paper_id,
                    focus_keywords=tuple(body.focus_keywords),
                )
            else:
                added = pipeline.generate_topic_questions(
                    state, ctx.services, max_fields=body.max_fields or 6
                )
            ctx.save(state)
        return {"eqs": [eq.to_dict() for eq in added]}

    @app.post(API_PREFIX + "/sessions/{session_id}/eqs", status_code=201)
    def add_eq(session_id: str, body: ManualEqIn):
        state = ctx.get_state(session_id)
        text, flags = validate_question(body.text)
        if not text:
            raise ValueError("question text cannot be empty")
        if not body.discipline.strip():
            raise ValueError("discipline cannot be empty")
        with ctx.store.lock_for(session_id):
            eq = state.add_question(
                EqDraft(
                    text=text,
                    discipline=body.discipline.strip(),
                    origin="user_created",
                    flags=flags,
                )
            )
            ctx.save(state)
        return {"eq": eq.to_dict()}

    @app.patch(API_PREFIX + "/sessions/{session_id}/eqs/{eq_id}")
    def patch_eq(session_id: str, eq_id: str, body: EqPatch):
        state = ctx.get_state(session_id)
        if body.text is None and body.selected is None:
            raise ValueError("nothing to update")
        text = body.text
        if text is not None:
            text, _ = validate_question(text)
            if not text:
                raise ValueError("question text cannot be empty")
        with ctx.store.lock_for(session_id):
            eq = state.update_question(eq_id, text=text, selected=body.selected)
            ctx.save(state)
        return {"eq": eq.to_dict()}

    @app.post(API_PREFIX + "/sessions/{session_id}/eqs/{eq_id}/explore", status_code=202)
    def explore_eq(session_id: str, eq_id: str):
        state = ctx.get_state(session_id)
        state.get_question(eq_id)
        job = ctx.new_job(session_id, eq_id)

        def run() -> None:
            def progress(stage: str) -> None:
                job.status = stage

            try:
                with ctx.store.lock_for(session_id):
                    pipeline.explore(state, ctx.services, eq_id, progress=progress)
                    ctx.save(state)
            except Exception as exc:
                ctx.finish_job(job, "failed", error=f"{type(exc).__name__}: {exc}")
            else:
                ctx.finish_job(job, "done")

        ctx.executor.submit(run)
        return {"job_id": job.job_id, "eq_id": eq_id, "status": job.status}

    @app.get(API_PREFIX + "/sessions/{session_id}/jobs/{job_id}")
    def get_job(session_id: str, job_id: str):
        job = ctx.jobs.get(job_id)
        if job is None or job.session_id != session_id:
            raise NotFound(f"no job {job_id}")
        return job.to_dict()

    @app.get(API_PREFIX + "/sessions/{session_id}/themes/{eq_id}")
    def get_themes(session_id: str, eq_id: str):
        state = ctx.get_state(session_id)
        with ctx.store.lock_for(session_id):
            return _theme_payload(state, eq_id)

    @app.get(API_PREFIX + "/papers/{paper_id}/links")
    def get_links(
        paper_id: str,
        direction: Literal["citations", "references"] = Query(...),
        session: str = Query(...),
    ):
        state = ctx.get_state(session)
        with ctx.store.lock_for(session):
            groups = pipeline.linked_papers(state, ctx.services, paper_id, direction)
            ctx.save(state)
        return {
            "paper_id": paper_id,
            "direction": direction,
            "groups": [
                {
                    "discipline": g.discipline,
                    "value_score": g.value_score,
                    "exploration": g.exploration,
                    "combined": g.combined,
                    "papers": [
                        {**p.to_dict(), "similarity": g.paper_similarities[p.paper_id]}
                        for p in g.papers
                    ],
                }
                for g in groups
            ],
        }

    @app.post(API_PREFIX + "/sessions/{session_id}/collections/edits")
    def apply_edits(session_id: str, body: EditsIn):
        state = ctx.get_state(session_id)
        with ctx.store.lock_for(session_id):
            summary = state.apply_edits(body.edits)
            ctx.save(state)
        return summary

    @app.get(API_PREFIX + "/sessions/{session_id}/export")
    def export_session(session_id: str, format: Literal["json", "markdown"] = "json"):
        state = ctx.get_state(session_id)
        with ctx.store.lock_for(session_id):
            rendered = export_mod.export_outline(state, ctx.services.embedder, format=format)
        # Serve the renderer's exact bytes: two exports of the same state
        # must compare equal byte for byte, whatever the client.
        if format == "markdown":
            return PlainTextResponse(rendered, media_type="text/markdown; charset=utf-8")
        return PlainTextResponse(rendered, media_type="application/json")

    frontend_dist = os.environ.get("FRONTEND_DIST")
    if frontend_dist and Path(frontend_dist).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=frontend_dist, html=True), name="ui")

    return app


def parse_bind(addr: str) -> tuple[str, int]:
    host, _, port_text = addr.rpartition(":")
    if not host or not port_text.isdigit():
        raise ValueError(f"bad bind address: {addr!r}")
    return host, int(port_text)


def main() -> None:
    import uvicorn

    host, port = parse_bind(os.environ.get("BIND_ADDR", DEFAULT_BIND))
    uvicorn.run(create_app(), host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
