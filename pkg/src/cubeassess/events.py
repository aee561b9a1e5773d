"""Task event records and structure replay.

A task log is the initial structure plus a time-ordered list of connect and
disconnect actions.  Replay reconstructs the structure after every event,
rejecting any action a rigid, base-rooted cube structure could not perform:
occupied or absent cells, non-adjacent attachments, base removal, and
removals that would orphan part of the structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from . import geometry
from .errors import (
    BaseRemoval,
    CellAbsent,
    CellOccupied,
    DisconnectsStructure,
    NonMonotonicTime,
    NotAdjacent,
)
from .geometry import Cell, Polycube

BASE_CELL: Cell = (0, 0, 0)


class Action(str, Enum):
    CONNECT = "connect"
    DISCONNECT = "disconnect"


class Outcome(str, Enum):
    COMPLETED = "completed"  # participant declared the match done
    STOPPED = "stopped"  # assessor ended the task


@dataclass(frozen=True)
class TaskEvent:
    t: float  # seconds since the prototype appeared
    action: Action
    cell: Cell
    cube_id: int
    client_t: float | None = None  # auxiliary client-side timestamp, if any


@dataclass(frozen=True)
class TaskRecord:
    task_id: str
    prototype_id: str
    participant_code: str
    initial: Polycube
    events: tuple[TaskEvent, ...] = ()
    outcome: Outcome | None = None  # None while the task is still running

    def __post_init__(self):
        if BASE_CELL not in self.initial:
            raise ValueError("initial structure must contain the base cell (0,0,0)")

    def with_event(self, event: TaskEvent) -> "TaskRecord":
        return replace(self, events=self.events + (event,))

    def sealed(self, outcome: Outcome) -> "TaskRecord":
        return replace(self, outcome=outcome)


def apply_event(structure: Polycube, event: TaskEvent) -> Polycube:
    """One replay step; raises if the action is physically impossible."""
    cell = event.cell
    if event.action is Action.CONNECT:
        if cell in structure:
            raise CellOccupied(f"connect at occupied cell {cell}")
        if not geometry.is_adjacent(cell, structure):
            raise NotAdjacent(f"connect at {cell} touches no existing cube")
        return structure | {cell}
    if cell == BASE_CELL:
        raise BaseRemoval("the base cube cannot be disconnected")
    if cell not in structure:
        raise CellAbsent(f"disconnect at empty cell {cell}")
    remaining = structure - {cell}
    if not geometry.is_connected(remaining):
        raise DisconnectsStructure(f"removing {cell} would orphan part of the structure")
    return remaining


def replay(record: TaskRecord) -> list[Polycube]:
    """States after each event, prefixed by the initial structure.

    Always returns len(events) + 1 structures; every one is face-connected
    and contains the base cell.
    """
    if not geometry.is_connected(record.initial):
        raise DisconnectsStructure("initial structure is not face-connected")
    last_t = None
    states = [record.initial]
    for ev in record.events:
        if last_t is not None and ev.t < last_t:
            raise NonMonotonicTime(f"event at t={ev.t} after t={last_t}")
        last_t = ev.t
        states.append(apply_event(states[-1], ev))
    return states
