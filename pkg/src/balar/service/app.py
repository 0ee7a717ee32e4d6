"""HTTP session service: create, inspect, step, answer, expand, transcript.

Per-session mutations serialize through a non-blocking lock: of two
concurrent writers exactly one wins and the loser gets 409, never a torn
state. Views are snapshots and may be read concurrently.
"""

from __future__ import annotations

import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from ..config import Instance, LoopConfig
from ..elicitation import ChatElicitor, ScriptedOracle, load_fixture
from ..errors import (
    BalarError,
    ConfigError,
    ElicitationFailure,
    ElicitationProtocolError,
    ExpansionRefused,
    SessionStateError,
)
from ..session import RUNNING, Session
from .views import build_session_view


class CreateSessionRequest(BaseModel):
    instance: dict
    config: dict | None = None
    elicitor: str = Field(description='"scripted:<fixture>" or "chat"')


class AnswerRequest(BaseModel):
    text: str


class _Slot:
    def __init__(self, session: Session):
        self.session = session
        self.lock = threading.Lock()


def _elicitation_detail(exc: BalarError) -> dict:
    return {"call_kind": getattr(exc, "call_kind", None), "message": str(exc)}


def create_app(
    fixtures_dir: str | Path | None = None,
    transcript_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="balar session service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    sessions: dict[str, _Slot] = {}
    registry_lock = threading.Lock()

    def _resolve_fixture(name: str) -> dict:
        candidate = Path(name)
        if not candidate.suffix:
            candidate = candidate.with_suffix(".json")
        if not candidate.is_absolute() and fixtures_dir is not None:
            candidate = Path(fixtures_dir) / candidate
        if not candidate.exists():
            raise HTTPException(422, detail=f"unknown fixture {name!r}")
        return load_fixture(candidate)

    def _build_elicitor(spec: str, fixture_config: dict) -> object:
        if spec == "chat":
            try:
                return ChatElicitor.from_env()
            except ConfigError as exc:
                raise HTTPException(422, detail=str(exc)) from exc
        if spec.startswith("scripted:"):
            fixture = _resolve_fixture(spec.split(":", 1)[1])
            fixture_config.update(fixture.get("config") or {})
            return ScriptedOracle(fixture)
        raise HTTPException(422, detail=f"unknown elicitor {spec!r}")

    def _slot(session_id: str) -> _Slot:
        slot = sessions.get(session_id)
        if slot is None:
            raise HTTPException(404, detail=f"unknown session {session_id!r}")
        return slot

    def _view(session_id: str, full_ranking: bool = False) -> dict:
        return build_session_view(_slot(session_id).session, session_id, full_ranking)

    def _persist(session_id: str) -> None:
        if transcript_dir is not None:
            path = Path(transcript_dir) / f"{session_id}.jsonl"
            _slot(session_id).session.transcript.write(path)

    def _locked(session_id: str):
        slot = _slot(session_id)
        if not slot.lock.acquire(blocking=False):
            raise HTTPException(409, detail="another mutation is in flight")
        return slot

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "sessions": len(sessions)}

    @app.post("/sessions", status_code=201)
    def create_session(request: CreateSessionRequest) -> dict:
        fixture_config: dict = {}
        elicitor = _build_elicitor(request.elicitor, fixture_config)
        config_data = request.config if request.config is not None else fixture_config
        try:
            instance = Instance.from_dict(request.instance)
            config = LoopConfig.from_dict(config_data or {})
        except (ConfigError, TypeError) as exc:
            raise HTTPException(422, detail=str(exc)) from exc
        try:
            session = Session(instance, elicitor, config)
        except (ElicitationFailure, ElicitationProtocolError) as exc:
            raise HTTPException(502, detail=_elicitation_detail(exc)) from exc
        except ConfigError as exc:
            raise HTTPException(422, detail=str(exc)) from exc
        session_id = uuid.uuid4().hex[:12]
        with registry_lock:
            sessions[session_id] = _Slot(session)
        _persist(session_id)
        return {"session_id": session_id}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str, full_ranking: bool = Query(default=False)) -> dict:
        return _view(session_id, full_ranking)

    @app.post("/sessions/{session_id}/step")
    def step(session_id: str) -> dict:
        slot = _locked(session_id)
        try:
            session = slot.session
            if session.state.status != RUNNING:
                raise HTTPException(
                    409, detail={"message": "session is terminal", "status": session.state.status}
                )
            if session.pending is not None:
                raise HTTPException(409, detail={"message": "an ask is pending"})
            try:
                session.step()
            except (ElicitationFailure, ElicitationProtocolError) as exc:
                raise HTTPException(502, detail=_elicitation_detail(exc)) from exc
            _persist(session_id)
            return build_session_view(session, session_id)
        finally:
            slot.lock.release()

    @app.post("/sessions/{session_id}/answer")
    def submit_answer(session_id: str, request: AnswerRequest) -> dict:
        slot = _locked(session_id)
        try:
            session = slot.session
            if session.pending is None:
                raise HTTPException(409, detail={"message": "no ask is pending"})
            try:
                session.submit_answer(request.text)
            except (ElicitationFailure, ElicitationProtocolError) as exc:
                # the pending ask is retained so the answer can be retried
                raise HTTPException(502, detail=_elicitation_detail(exc)) from exc
            except SessionStateError as exc:
                raise HTTPException(409, detail={"message": str(exc)}) from exc
            _persist(session_id)
            return build_session_view(session, session_id)
        finally:
            slot.lock.release()

    @app.post("/sessions/{session_id}/expand")
    def expand(session_id: str) -> dict:
        slot = _locked(session_id)
        try:
            session = slot.session
            try:
                session.force_expand()
            except ExpansionRefused as exc:
                raise HTTPException(409, detail={"message": str(exc)}) from exc
            except SessionStateError as exc:
                raise HTTPException(409, detail={"message": str(exc)}) from exc
            except (ElicitationFailure, ElicitationProtocolError) as exc:
                raise HTTPException(502, detail=_elicitation_detail(exc)) from exc
            _persist(session_id)
            return build_session_view(session, session_id)
        finally:
            slot.lock.release()

    @app.get("/sessions/{session_id}/transcript")
    def get_transcript(session_id: str) -> dict:
        session = _slot(session_id).session
        return {"events": [event.to_record() for event in session.transcript.events]}

    return app
