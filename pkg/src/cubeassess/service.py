"""HTTP service exposing live sessions to the web front end.

Participants see the rotating prototype and their own acknowledged
structure; the payload for unguided tasks never carries any precision
feedback.  Assessors get advance/abort controls, results, and a
server-sent-event stream with one similarity point per accepted event.

Persistence is append-only JSON Lines per task inside a per-session
directory plus a manifest; every event is flushed and fsynced before the
acknowledgment goes out, so a crash after an ack never loses the event.
Event timestamps are assigned server-side at acceptance (monotonic within a
task); client clocks are stored as auxiliary data only.
"""

from __future__ import annotations

import asyncio
import json
import os
import time
import uuid
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from .errors import CubeError, InvalidLibrary, UnknownSession, WrongPhase
from .eventlog import dump_record, event_line, header_line, load_record, parse_record
from .events import Action, Outcome, TaskEvent, TaskRecord
from .geometry import poly
from .measures import compute_measures
from .similarity import best_similarity
from .tasks import (
    Phase,
    Session,
    TaskKind,
    TaskSpec,
    load_library,
    session_manifest,
    task_log_name,
)

ROTATION_RPM = 2.7
CUE_CONNECT = "chime-connect"
CUE_DISCONNECT = "chime-disconnect"

# HTTP status per error family: unknown things are 404, state conflicts 409
_CONFLICT_CODES = 409
_NOT_FOUND = 404


@dataclass
class ServiceConfig:
    sessions_dir: Path
    library_path: Path
    assessor_token: str | None = None


class CreateSessionIn(BaseModel):
    participant_code: str
    group: str = ""


class EventIn(BaseModel):
    action: Action
    x: int
    y: int
    z: int
    cube_id: int
    client_t: float | None = None


def _http_error(exc: CubeError, status: int) -> HTTPException:
    return HTTPException(status, detail={"code": exc.code, "message": str(exc)})


class LiveSession:
    """One session plus its on-disk artifacts and stream subscribers."""

    def __init__(self, session: Session, directory: Path, created_at: float):
        self.session = session
        self.directory = directory
        self.created_at = created_at
        self.lock = asyncio.Lock()
        self.subscribers: list[asyncio.Queue] = []
        self.stream_history: list[dict] = []
        self.seq = 0
        self._log = None
        self._task_started = time.monotonic()
        self._last_t = 0.0

    # -- persistence ------------------------------------------------------

    def write_manifest(self):
        manifest = session_manifest(self.session)
        manifest["created_at"] = self.created_at
        tmp = self.directory / "manifest.json.tmp"
        tmp.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        os.replace(tmp, self.directory / "manifest.json")

    def open_task_log(self):
        path = self.directory / task_log_name(
            self.session.task_index, self.session.current_record.task_id
        )
        fresh = not path.exists()
        self._log = open(path, "a", encoding="utf-8")
        if fresh:
            self._log.write(header_line(self.session.current_record) + "\n")
            self._flush_log()
        self._task_started = time.monotonic()
        self._last_t = (
            self.session.current_record.events[-1].t
            if self.session.current_record.events
            else 0.0
        )

    def _flush_log(self):
        self._log.flush()
        os.fsync(self._log.fileno())

    def append_event(self, event: TaskEvent):
        self._log.write(event_line(event) + "\n")
        self._flush_log()

    def seal_task_log(self, record: TaskRecord):
        """Rewrite the finished log atomically so the header carries the outcome."""
        if self._log:
            self._log.close()
            self._log = None
        index = len(self.session.records) - 1
        path = self.directory / task_log_name(index, record.task_id)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(dump_record(record), encoding="utf-8")
        os.replace(tmp, path)

    # -- time -------------------------------------------------------------

    def next_timestamp(self) -> float:
        t = round(time.monotonic() - self._task_started, 3)
        if t <= self._last_t:
            t = round(self._last_t + 0.001, 3)
        self._last_t = t
        return t

    # -- streaming --------------------------------------------------------

    def broadcast(self, message: dict):
        self.stream_history.append(message)
        for q in self.subscribers:
            q.put_nowait(message)

    def close_streams(self):
        for q in self.subscribers:
            q.put_nowait(None)

    def record_accepted(self, event: TaskEvent):
        self.seq += 1
        value = best_similarity(self.session.structure, self.session.current_task.prototype)
        self.broadcast(
            {
                "seq": self.seq,
                "task_id": self.session.current_task.task_id,
                "t": event.t,
                "similarity": float(value.value),
                "event_count": self.seq,
            }
        )


class SessionStore:
    def __init__(self, config: ServiceConfig):
        self.config = config
        self.config.sessions_dir.mkdir(parents=True, exist_ok=True)
        self.sessions: dict[str, LiveSession] = {}
        self._restore_all()

    # -- restore ----------------------------------------------------------

    def _restore_all(self):
        for path in sorted(self.config.sessions_dir.iterdir()):
            if path.is_dir() and (path / "manifest.json").is_file():
                live = self._restore_one(path)
                self.sessions[live.session.session_id] = live

    def _restore_one(self, directory: Path) -> LiveSession:
        manifest = json.loads((directory / "manifest.json").read_text(encoding="utf-8"))
        tasks = [
            TaskSpec(
                task_id=entry["task_id"],
                kind=TaskKind(entry["kind"]),
                prototype=poly(entry["prototype_cells"]),
                prototype_id=entry["prototype_id"],
                initial=poly(entry["initial_cells"]),
            )
            for entry in manifest["tasks"]
        ]
        session = Session(
            manifest["session_id"],
            manifest["participant_code"],
            tasks,
            group=manifest.get("group", ""),
        )
        live = LiveSession(session, directory, manifest.get("created_at", 0.0))

        for entry in manifest["tasks"]:
            log = directory / entry["log"]
            if entry["outcome"] is not None:
                record = load_record(log)
                for event in record.events:
                    session.apply_event(event)
                    live.record_accepted(event)
                session._seal(Outcome(entry["outcome"]))
            elif log.is_file():
                # the task that was running when the server stopped
                record = parse_record(log.read_text(encoding="utf-8"))
                for event in record.events:
                    session.apply_event(event)
                    live.record_accepted(event)
                break
            else:
                break
        if session.active:
            live.open_task_log()
        else:
            live.close_streams()
        return live

    # -- operations -------------------------------------------------------

    def create(self, participant_code: str, group: str) -> LiveSession:
        try:
            tasks = load_library(self.config.library_path)
        except InvalidLibrary as e:
            raise _http_error(e, 400)
        session_id = uuid.uuid4().hex[:12]
        directory = self.config.sessions_dir / session_id
        directory.mkdir(parents=True)
        session = Session(session_id, participant_code, tasks, group=group)
        live = LiveSession(session, directory, created_at=time.time())
        live.write_manifest()
        live.open_task_log()
        self.sessions[session_id] = live
        return live

    def get(self, session_id: str) -> LiveSession:
        if session_id not in self.sessions:
            raise _http_error(UnknownSession(f"no session {session_id}"), _NOT_FOUND)
        return self.sessions[session_id]


def _task_view(live: LiveSession) -> dict:
    """Participant-facing task payload; no precision feedback, ever."""
    session = live.session
    spec = session.current_task
    view = {
        "session_id": session.session_id,
        "task_id": spec.task_id,
        "kind": spec.kind.value,
        "phase": session.phase.value,
        "task_index": session.task_index,
        "task_count": len(session.tasks),
        "rotation_rpm": ROTATION_RPM,
        "prototype": sorted(list(c) for c in spec.prototype),
        "structure": sorted(list(c) for c in session.structure),
        "guided": spec.guided,
        "guidance": None,
    }
    if spec.guided:
        step = session.guidance()
        if step is not None:
            view["guidance"] = {"action": step.action.value, "cell": list(step.cell)}
    return view


def _results_view(live: LiveSession) -> dict:
    session = live.session
    tasks = []
    for i, record in enumerate(session.records):
        spec = session.tasks[i]
        measures = None
        if record.events:
            m = compute_measures(record, spec.prototype)
            measures = {
                "similarity": float(m.similarity),
                "last_connect": m.last_connect,
                "derivative": float(m.derivative),
                "zero_crossings": m.zero_crossings,
            }
        tasks.append(
            {
                "task_id": record.task_id,
                "kind": spec.kind.value,
                "outcome": record.outcome.value if record.outcome else None,
                "event_count": len(record.events),
                "measures": measures,
            }
        )
    if session.active:
        tasks.append(
            {
                "task_id": session.current_record.task_id,
                "kind": session.current_task.kind.value,
                "outcome": None,
                "event_count": len(session.current_record.events),
                "measures": None,
            }
        )
    return {
        "session_id": session.session_id,
        "participant_code": session.participant_code,
        "group": session.group,
        "phase": session.phase.value,
        "tasks": tasks,
        "total_events": live.seq,
    }


def create_app(config: ServiceConfig) -> FastAPI:
    app = FastAPI(title="cubeassess service")
    store = SessionStore(config)
    app.state.store = store

    def require_assessor(request: Request):
        token = config.assessor_token
        if token and request.headers.get("x-assessor-token") != token:
            raise HTTPException(403, detail={"code": "Forbidden", "message": "assessor token required"})

    @app.post("/sessions", status_code=201)
    async def create_session(body: CreateSessionIn):
        live = store.create(body.participant_code, body.group)
        return {
            "session_id": live.session.session_id,
            "participant_code": live.session.participant_code,
            "created_at": live.created_at,
            "phase": live.session.phase.value,
        }

    @app.get("/sessions/{session_id}/task")
    async def get_task(session_id: str):
        live = store.get(session_id)
        if not live.session.active:
            raise _http_error(WrongPhase(f"session is {live.session.phase.value}"), _CONFLICT_CODES)
        return _task_view(live)

    @app.post("/sessions/{session_id}/events")
    async def post_event(session_id: str, body: EventIn):
        live = store.get(session_id)
        async with live.lock:
            if not live.session.active:
                raise _http_error(
                    WrongPhase(f"session is {live.session.phase.value}"), _CONFLICT_CODES
                )
            event = TaskEvent(
                t=live.next_timestamp(),
                action=body.action,
                cell=(body.x, body.y, body.z),
                cube_id=body.cube_id,
                client_t=body.client_t,
            )
            try:
                live.session.apply_event(event)
            except CubeError as e:
                raise _http_error(e, _CONFLICT_CODES)
            live.append_event(event)  # durable before the ack below
            live.record_accepted(event)
            return {
                "accepted": True,
                "t": event.t,
                "event_count": len(live.session.current_record.events),
                "cue": CUE_CONNECT if body.action is Action.CONNECT else CUE_DISCONNECT,
            }

    async def _seal(session_id: str, advance: bool):
        live = store.get(session_id)
        async with live.lock:
            try:
                if advance:
                    live.session.advance()
                else:
                    live.session.abort_task()
            except CubeError as e:
                raise _http_error(e, _CONFLICT_CODES)
            live.seal_task_log(live.session.records[-1])
            live.write_manifest()
            if live.session.active:
                live.open_task_log()
            else:
                live.close_streams()
            return {
                "phase": live.session.phase.value,
                "task_index": live.session.task_index,
                "completed_tasks": len(live.session.records),
            }

    @app.post("/sessions/{session_id}/advance")
    async def advance(session_id: str, _=Depends(require_assessor)):
        return await _seal(session_id, advance=True)

    @app.post("/sessions/{session_id}/abort")
    async def abort(session_id: str, _=Depends(require_assessor)):
        return await _seal(session_id, advance=False)

    @app.get("/sessions/{session_id}/results")
    async def results(session_id: str, _=Depends(require_assessor)):
        return _results_view(store.get(session_id))

    @app.get("/sessions/{session_id}/stream")
    async def stream(session_id: str, _=Depends(require_assessor)):
        live = store.get(session_id)

        async def gen():
            queue: asyncio.Queue = asyncio.Queue()
            # replay history first so every subscriber sees the same sequence
            for message in live.stream_history:
                yield f"data: {json.dumps(message, sort_keys=True)}\n\n"
            if not live.session.active:
                yield 'event: end\ndata: {"done": true}\n\n'
                return
            live.subscribers.append(queue)
            try:
                while True:
                    message = await queue.get()
                    if message is None:
                        yield 'event: end\ndata: {"done": true}\n\n'
                        return
                    yield f"data: {json.dumps(message, sort_keys=True)}\n\n"
            finally:
                live.subscribers.remove(queue)

        return StreamingResponse(gen(), media_type="text/event-stream")

    return app


def run(config: ServiceConfig, host: str = "127.0.0.1", port: int = 8000):
    import uvicorn

    uvicorn.run(create_app(config), host=host, port=port, log_level="warning")
