"""HTTP session service for teach-then-test runs with human learners.

A session walks a fixed item order: the group's teaching sequence (with the
correct label revealed after each answer) followed by the configured test
items (no feedback).  Item order is frozen at creation, items are answered
at most once, and ground-truth labels for test items are never exposed
before the session completes.  Sessions are in-memory; answers can also be
appended to a JSON-lines log so aggregates survive restarts.
"""

from __future__ import annotations

import json
import secrets
import threading
import time
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .core import Example, TeachingProblem, UsageError

PHASE_TEACH = "teach"
PHASE_TEST = "test"
PHASE_DONE = "done"


@dataclass
class ServeConfig:
    problem: TeachingProblem
    groups: dict[str, list[str]]
    test_len: int = 10
    serve_features: bool = True
    label_names: dict[int, str] = field(default_factory=lambda: {1: "Positive", -1: "Negative"})
    assets_dir: Optional[str] = None
    log_path: Optional[str] = None

    def __post_init__(self):
        by_id = {x.id: x for x in self.problem.teaching_set}
        for name, ids in self.groups.items():
            missing = [i for i in ids if i not in by_id]
            if missing:
                raise UsageError(f"group {name!r} references unknown example ids {missing}")
        self.groups.setdefault("none", [])
        if not self.problem.test_set:
            raise UsageError("session service needs a problem with a test set")
        if not 0 < self.test_len <= len(self.problem.test_set):
            raise UsageError("test_len must be within the test set size")


@dataclass
class _Answer:
    item_id: str
    given_label: int
    correct: bool
    phase: str
    timestamp: float


@dataclass
class _Session:
    session_id: str
    group: str
    teach_items: list[str]
    test_items: list[str]
    cursor: int = 0
    answers: list[_Answer] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def items(self) -> list[str]:
        return self.teach_items + self.test_items

    @property
    def phase(self) -> str:
        if self.cursor >= len(self.items):
            return PHASE_DONE
        return PHASE_TEACH if self.cursor < len(self.teach_items) else PHASE_TEST


class CreateSessionRequest(BaseModel):
    group: str


class AnswerRequest(BaseModel):
    item_id: str
    label: int


def create_app(config: ServeConfig) -> FastAPI:
    app = FastAPI(title="crowdteach session service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    sessions: dict[str, _Session] = {}
    store_lock = threading.Lock()
    log_lock = threading.Lock()
    examples: dict[str, Example] = {x.id: x for x in config.problem.teaching_set}
    examples.update({x.id: x for x in config.problem.test_set})
    test_order = [x.id for x in config.problem.test_set[: config.test_len]]

    def _session(session_id: str) -> _Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    def _log_answer(session: _Session, answer: _Answer) -> None:
        if not config.log_path:
            return
        record = {
            "session_id": session.session_id,
            "group": session.group,
            "item_id": answer.item_id,
            "given_label": answer.given_label,
            "correct": answer.correct,
            "phase": answer.phase,
            "timestamp": answer.timestamp,
        }
        with log_lock:
            with open(config.log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record) + "\n")

    def _item_payload(session: _Session) -> dict:
        item_id = session.items[session.cursor]
        item = examples[item_id]
        payload = {
            "item_id": item_id,
            "phase": session.phase,
            "index": session.cursor,
            "total": len(session.items),
        }
        if item.asset is not None:
            payload["asset"] = item.asset
        if config.serve_features:
            payload["features"] = [float(v) for v in item.features]
        return payload

    @app.post("/sessions")
    def create_session(request: CreateSessionRequest):
        if request.group not in config.groups:
            raise HTTPException(status_code=404, detail=f"unknown group {request.group!r}")
        session = _Session(
            session_id=secrets.token_hex(16),
            group=request.group,
            teach_items=list(config.groups[request.group]),
            test_items=list(test_order),
        )
        with store_lock:
            sessions[session.session_id] = session
        return {
            "session_id": session.session_id,
            "n_teach": len(session.teach_items),
            "n_test": len(session.test_items),
            "labels": {"1": config.label_names[1], "-1": config.label_names[-1]},
        }

    @app.get("/sessions/{session_id}/next")
    def next_item(session_id: str):
        session = _session(session_id)
        with session.lock:
            if session.phase == PHASE_DONE:
                return {"done": True, "report_url": f"/sessions/{session_id}/report"}
            return _item_payload(session)

    @app.post("/sessions/{session_id}/answer")
    def submit_answer(session_id: str, request: AnswerRequest):
        session = _session(session_id)
        if request.label not in (-1, 1):
            raise HTTPException(status_code=422, detail="label must be -1 or +1")
        with session.lock:
            if session.phase == PHASE_DONE:
                raise HTTPException(status_code=409, detail="session already complete")
            current = session.items[session.cursor]
            if request.item_id != current:
                raise HTTPException(
                    status_code=409,
                    detail=f"item {request.item_id!r} is not the current item",
                )
            truth = examples[current].label
            phase = session.phase
            answer = _Answer(
                item_id=current,
                given_label=request.label,
                correct=request.label == truth,
                phase=phase,
                timestamp=time.time(),
            )
            session.answers.append(answer)
            session.cursor += 1
            _log_answer(session, answer)
            if phase == PHASE_TEACH:
                return {"feedback": {"correct_label": truth}}
            return {"feedback": None}

    @app.get("/sessions/{session_id}/report")
    def session_report(session_id: str):
        session = _session(session_id)
        with session.lock:
            if session.phase != PHASE_DONE:
                raise HTTPException(status_code=409, detail="session is not complete")
            test_answers = [a for a in session.answers if a.phase == PHASE_TEST]
            wrong = sum(not a.correct for a in test_answers)
            return {
                "group": session.group,
                "test_error": wrong / len(test_answers) if test_answers else 0.0,
                "per_item": [
                    {
                        "item_id": a.item_id,
                        "phase": a.phase,
                        "given_label": a.given_label,
                        "correct": a.correct,
                    }
                    for a in session.answers
                ],
            }

    if config.assets_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/assets", StaticFiles(directory=config.assets_dir), name="assets")

    return app
