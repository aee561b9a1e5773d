"""JSON Lines serialization of task records.

Line 1 is a header object (task_id, prototype_id, participant_code, initial
cells, outcome); every following line is one event {t, action, x, y, z,
cube_id}.  Times are seconds with millisecond or better resolution.  Extra
fields (e.g. an auxiliary client timestamp) are preserved on read.

Keys are sorted and separators fixed so equal records serialize to identical
bytes, which simulation determinism tests rely on.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from .events import Action, Outcome, TaskEvent, TaskRecord
from .geometry import poly


def header_line(record: TaskRecord) -> str:
    return json.dumps(
        {
            "task_id": record.task_id,
            "prototype_id": record.prototype_id,
            "participant_code": record.participant_code,
            "initial": sorted(list(c) for c in record.initial),
            "outcome": record.outcome.value if record.outcome else None,
        },
        sort_keys=True,
        separators=(",", ":"),
    )


def event_line(event: TaskEvent) -> str:
    obj = {
        "t": event.t,
        "action": event.action.value,
        "x": event.cell[0],
        "y": event.cell[1],
        "z": event.cell[2],
        "cube_id": event.cube_id,
    }
    if event.client_t is not None:
        obj["client_t"] = event.client_t
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def dump_record(record: TaskRecord) -> str:
    lines = [header_line(record)]
    lines.extend(event_line(ev) for ev in record.events)
    return "\n".join(lines) + "\n"


def parse_event(obj: dict) -> TaskEvent:
    return TaskEvent(
        t=float(obj["t"]),
        action=Action(obj["action"]),
        cell=(int(obj["x"]), int(obj["y"]), int(obj["z"])),
        cube_id=int(obj["cube_id"]),
        client_t=float(obj["client_t"]) if obj.get("client_t") is not None else None,
    )


def parse_record(text: str) -> TaskRecord:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty event log")
    head = json.loads(lines[0])
    events = tuple(parse_event(json.loads(ln)) for ln in lines[1:])
    return TaskRecord(
        task_id=str(head["task_id"]),
        prototype_id=str(head["prototype_id"]),
        participant_code=str(head["participant_code"]),
        initial=poly(head["initial"]),
        events=events,
        outcome=Outcome(head["outcome"]) if head.get("outcome") else None,
    )


def load_record(path: str | Path) -> TaskRecord:
    return parse_record(Path(path).read_text(encoding="utf-8"))


def save_record(record: TaskRecord, path: str | Path) -> None:
    Path(path).write_text(dump_record(record), encoding="utf-8")


def load_records(paths: Iterable[str | Path]) -> list[TaskRecord]:
    return [load_record(p) for p in sorted(Path(p) for p in paths)]
