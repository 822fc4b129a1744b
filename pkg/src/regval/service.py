"""HTTP session service: create synthesis sessions, poll, answer, evaluate.

Each session runs in its own worker thread; questions cross the thread
boundary through a channel oracle, so polling clients observe the
running -> awaiting_answer -> running -> done/failed lifecycle.  Sessions are
in-memory only and evicted after an idle period.
"""

from __future__ import annotations

import threading
import time
import uuid
from typing import Literal

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field

from . import engine, orchestrator
from .model import (
    CaptureCondition,
    ExampleSet,
    ExampleSetError,
    count_groups,
    parse_condition,
)

DEFAULT_SESSION_CAP = 64
DEFAULT_IDLE_SECONDS = 30 * 60


class SessionOptions(BaseModel):
    mode: Literal["multitree", "ktree"] = "multitree"
    split: bool = True
    pruning: bool = True
    timeout: float = Field(default=3600.0, gt=0)
    question_cap: int = Field(default=20, ge=0)


class SessionCreateRequest(BaseModel):
    valid: list[str]
    invalid: list[str] = []
    conditional_invalid: list[str] = []
    options: SessionOptions = SessionOptions()


class QuestionModel(BaseModel):
    text: str
    phase: Literal["regex", "captures"]


class ResultModel(BaseModel):
    regex: str
    conditions: list[str]


class SessionResource(BaseModel):
    id: str
    state: Literal["running", "awaiting_answer", "done", "failed"]
    question: QuestionModel | None = None
    result: ResultModel | None = None
    stats: dict
    failure: str | None = None
    best_effort: bool = False


class AnswerRequest(BaseModel):
    valid: bool


class EvalRequest(BaseModel):
    regex: str
    conditions: list[str] = []
    input: str


class EvalResponse(BaseModel):
    matches: bool
    captures: list[int] | None
    satisfies_conditions: bool | None


class _ChannelOracle(orchestrator.AnswerOracle):
    """Blocks the worker until an answer arrives over the channel."""

    def __init__(self):
        self.lock = threading.Lock()
        self.event = threading.Event()
        self.question: orchestrator.Question | None = None
        self.pending_answer: bool | None = None
        self.closed = False

    def answer_question(self, value: bool) -> bool:
        with self.lock:
            if self.question is None:
                return False
            self.pending_answer = value
            self.question = None
        self.event.set()
        return True

    def close(self):
        self.closed = True
        self.event.set()

    def answer(self, question, session):
        with self.lock:
            self.question = question
            self.pending_answer = None
            self.event.clear()
        while not self.event.wait(timeout=1.0):
            if self.closed:
                return None
        with self.lock:
            if self.closed:
                return None
            return self.pending_answer


class ManagedSession:
    def __init__(self, sid: str, examples: ExampleSet, options: SessionOptions):
        self.id = sid
        self.oracle = _ChannelOracle()
        self.last_access = time.monotonic()
        config = orchestrator.SynthesisConfig(
            mode=options.mode,
            split=options.split,
            pruning=options.pruning,
            timeout=options.timeout,
            question_cap=options.question_cap,
        )
        self.session: orchestrator.SynthesisSession | None = None
        self._examples = examples
        self._config = config
        self.thread = threading.Thread(target=self._run, daemon=True)
        self.thread.start()

    def _run(self):
        driver = orchestrator.SessionDriver(
            self._examples, self._config, interactive=True, autostart=False
        )
        self.session = driver.session
        try:
            driver.start()
            while driver.pending() is not None:
                answer = self.oracle.answer(driver.pending(), driver.session)
                if answer is None:
                    driver.abort("session evicted")
                    return
                driver.answer(answer)
        except Exception as exc:  # surface worker crashes as failed sessions
            self.session.phase = orchestrator.PHASE_FAILED
            self.session.failure = f"internal error: {exc}"
            raise

    def touch(self):
        self.last_access = time.monotonic()

    def snapshot(self) -> SessionResource:
        self.touch()
        session = self.session
        if session is None:
            return SessionResource(id=self.id, state="running", stats={})
        pending = None
        with self.oracle.lock:
            if self.oracle.question is not None:
                pending = QuestionModel(
                    text=self.oracle.question.text, phase=self.oracle.question.phase
                )
        if session.phase == orchestrator.PHASE_FAILED:
            state = "failed"
        elif session.phase == orchestrator.PHASE_DONE:
            state = "done"
        elif pending is not None:
            state = "awaiting_answer"
        else:
            state = "running"
        result = None
        if state == "done" and session.result is not None:
            result = ResultModel(
                regex=engine.emit(session.result.regex),
                conditions=[c.render() for c in session.result.conditions],
            )
        return SessionResource(
            id=self.id,
            state=state,
            question=pending if state == "awaiting_answer" else None,
            result=result,
            stats=session.stats.as_dict(),
            failure=session.failure,
            best_effort=session.best_effort,
        )

    def close(self):
        self.oracle.close()


def create_app(
    session_cap: int = DEFAULT_SESSION_CAP,
    idle_seconds: float = DEFAULT_IDLE_SECONDS,
    static_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="regval", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions: dict[str, ManagedSession] = {}
    lock = threading.Lock()

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    def evict_idle():
        now = time.monotonic()
        for sid in list(sessions):
            managed = sessions[sid]
            if now - managed.last_access > idle_seconds:
                managed.close()
                del sessions[sid]

    @app.post("/api/sessions", status_code=201)
    def create_session(body: SessionCreateRequest):
        with lock:
            evict_idle()
            if len(sessions) >= session_cap:
                return JSONResponse(
                    status_code=503, content={"detail": "session capacity reached"}
                )
            try:
                examples = ExampleSet(
                    tuple(body.valid),
                    tuple(body.invalid),
                    tuple(body.conditional_invalid),
                )
            except ExampleSetError as exc:
                return JSONResponse(status_code=400, content={"detail": str(exc)})
            sid = uuid.uuid4().hex
            sessions[sid] = ManagedSession(sid, examples, body.options)
        return {"id": sid}

    @app.get("/api/sessions/{sid}")
    def get_session(sid: str):
        managed = sessions.get(sid)
        if managed is None:
            return JSONResponse(status_code=404, content={"detail": "unknown session"})
        return managed.snapshot()

    @app.post("/api/sessions/{sid}/answer", status_code=204)
    def answer(sid: str, body: AnswerRequest):
        managed = sessions.get(sid)
        if managed is None:
            return JSONResponse(status_code=404, content={"detail": "unknown session"})
        managed.touch()
        if not managed.oracle.answer_question(body.valid):
            return JSONResponse(status_code=409, content={"detail": "no pending question"})
        return Response(status_code=204)

    @app.post("/api/eval")
    def evaluate(body: EvalRequest) -> EvalResponse:
        try:
            regex = engine.parse(body.regex)
            conditions = tuple(parse_condition(c) for c in body.conditions)
        except (engine.RegexParseError, ValueError) as exc:
            return JSONResponse(status_code=400, content={"detail": str(exc)})
        groups = count_groups(regex)
        for cond in conditions:
            if cond.group >= groups:
                return JSONResponse(
                    status_code=400,
                    content={"detail": f"condition {cond.render()} references a missing group"},
                )
        if not engine.full_match(regex, body.input):
            return EvalResponse(matches=False, captures=None, satisfies_conditions=None)
        if groups == 0:
            return EvalResponse(
                matches=True, captures=[], satisfies_conditions=True if not conditions else None
            )
        try:
            values = engine.extract_captures(regex, body.input)
        except engine.NonNumericCapture:
            return EvalResponse(matches=True, captures=None, satisfies_conditions=None)
        ok = all(c.holds(values[c.group]) for c in conditions)
        return EvalResponse(matches=True, captures=values, satisfies_conditions=ok)

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
