"""Task specifications, the prototype library, guidance, and sessions.

Four task kinds: intro and follow are guided (the display indicates the next
cube to attach), match is free construction from the base cube, and reshape
is free construction from a fixed 7-cube 3D starting structure.  Prototypes
are capped at ten cubes.

Guidance anchors the prototype to the structure at the base cell with the
identity rotation so the indicated cell stays spatially stable, and orders
candidates by (z, y, x).  When the structure holds cubes outside the
prototype the guidance switches to removals until the extras are gone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterator, NamedTuple, Sequence

from . import geometry
from .errors import InvalidLibrary, NoActiveTask, NotGuidedTask, WrongPhase
from .events import (
    BASE_CELL,
    Action,
    Outcome,
    TaskEvent,
    TaskRecord,
    apply_event,
)
from .eventlog import dump_record, load_record
from .geometry import Cell, Polycube, ShapeType, load_shape
from .similarity import best_similarity

MAX_PROTOTYPE_CUBES = 10
RESHAPE_START_CELLS = 7


class TaskKind(str, Enum):
    INTRO = "intro"
    FOLLOW = "follow"
    MATCH = "match"
    RESHAPE = "reshape"


GUIDED_KINDS = (TaskKind.INTRO, TaskKind.FOLLOW)

BASE_ONLY: Polycube = frozenset({BASE_CELL})


def default_reshape_start() -> Polycube:
    text = resources.files("cubeassess").joinpath("data/reshape_start.txt").read_text()
    return geometry.parse_shape(text).cells


@dataclass(frozen=True)
class TaskSpec:
    task_id: str
    kind: TaskKind
    prototype: Polycube
    prototype_id: str
    initial: Polycube = BASE_ONLY
    guided: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "guided", self.kind in GUIDED_KINDS)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


def validate_task(spec: TaskSpec) -> list[Violation]:
    """All invariant violations; an empty list means the task is usable."""
    out = []
    if not spec.prototype:
        out.append(Violation("EmptyPrototype", "prototype has no cells"))
        return out
    if len(spec.prototype) > MAX_PROTOTYPE_CUBES:
        out.append(
            Violation(
                "TooManyCubes",
                f"prototype has {len(spec.prototype)} cells; at most {MAX_PROTOTYPE_CUBES} allowed",
            )
        )
    if not geometry.is_connected(spec.prototype):
        out.append(Violation("NotConnected", "prototype is not face-connected"))
    if BASE_CELL not in spec.prototype:
        out.append(Violation("MissingBase", "prototype does not contain the base cell"))
    if BASE_CELL not in spec.initial:
        out.append(Violation("MissingBase", "initial structure does not contain the base cell"))
    elif not geometry.is_connected(spec.initial):
        out.append(Violation("NotConnected", "initial structure is not face-connected"))
    if spec.kind is TaskKind.RESHAPE:
        if len(spec.initial) != RESHAPE_START_CELLS:
            out.append(
                Violation(
                    "BadReshapeStart",
                    f"reshape starts from exactly {RESHAPE_START_CELLS} cubes, got {len(spec.initial)}",
                )
            )
        elif geometry.shape_type(spec.initial) is not ShapeType.THREE_D:
            out.append(Violation("BadReshapeStart", "reshape starting structure must be 3D"))
    elif spec.initial != BASE_ONLY:
        out.append(
            Violation("BadInitial", f"{spec.kind.value} tasks start from the base cube only")
        )
    return out


# ---------------------------------------------------------------------------
# guidance


class Guidance(NamedTuple):
    action: Action
    cell: Cell


def _zyx(cell: Cell):
    return (cell[2], cell[1], cell[0])


def _removable(structure: Polycube, cell: Cell) -> bool:
    return cell != BASE_CELL and geometry.is_connected(structure - {cell})


def construction_step(prototype: Polycube, current: Polycube) -> Guidance | None:
    """One deterministic step towards the prototype, or None when matched.

    Removal guidance only ever names cells outside the identity-anchored
    prototype, and takes priority whenever such a cell can come off without
    splitting the structure.  When every extra is load-bearing (prototype
    cells hang off it), missing prototype cells are added first; the adds
    re-anchor the hanging cells, so each cell is added or removed at most
    once and the walk finishes within |extras| + |missing| steps.
    """
    if best_similarity(current, prototype).value == 100:
        return None
    extras = current - prototype
    removable = sorted((c for c in extras if _removable(current, c)), key=_zyx)
    if removable:
        return Guidance(Action.DISCONNECT, removable[0])
    missing = prototype - current
    candidates = sorted(
        (c for c in missing if geometry.is_adjacent(c, current)), key=_zyx
    )
    return Guidance(Action.CONNECT, candidates[0])


def next_guidance_cube(spec: TaskSpec, current: Polycube) -> Guidance | None:
    """The next cube the display indicates for a guided task."""
    if not spec.guided:
        raise NotGuidedTask(f"{spec.kind.value} tasks provide no cube-by-cube guidance")
    return construction_step(spec.prototype, current)


# ---------------------------------------------------------------------------
# sessions


class Phase(str, Enum):
    PRESENTING = "presenting"
    BUILDING = "building"
    DONE = "done"
    ABORTED = "aborted"


class Session:
    """One participant working through a task queue.

    Single-owner: the service (or a simulator) serializes all mutations.
    Events are validated by the replay rules as they arrive, so the session
    never holds an unreplayable record.
    """

    def __init__(
        self,
        session_id: str,
        participant_code: str,
        tasks: Sequence[TaskSpec],
        group: str = "",
    ):
        if not tasks:
            raise InvalidLibrary("a session needs at least one task")
        self.session_id = session_id
        self.participant_code = participant_code
        self.group = group
        self.tasks = list(tasks)
        self.task_index = 0
        self.records: list[TaskRecord] = []
        self.phase = Phase.PRESENTING
        self._open_record(0)

    def _open_record(self, index: int):
        spec = self.tasks[index]
        self.current_record = TaskRecord(
            task_id=spec.task_id,
            prototype_id=spec.prototype_id,
            participant_code=self.participant_code,
            initial=spec.initial,
        )
        self.structure: Polycube = spec.initial

    @property
    def current_task(self) -> TaskSpec:
        return self.tasks[self.task_index]

    @property
    def active(self) -> bool:
        return self.phase in (Phase.PRESENTING, Phase.BUILDING)

    def apply_event(self, event: TaskEvent) -> TaskEvent:
        """Validate and append one event to the active record."""
        if not self.active:
            raise WrongPhase(f"session is {self.phase.value}; not accepting events")
        if self.current_record.events and event.t < self.current_record.events[-1].t:
            from .errors import NonMonotonicTime

            raise NonMonotonicTime(
                f"event at t={event.t} precedes t={self.current_record.events[-1].t}"
            )
        self.structure = apply_event(self.structure, event)
        self.current_record = self.current_record.with_event(event)
        self.phase = Phase.BUILDING
        return event

    def guidance(self) -> Guidance | None:
        spec = self.current_task
        if not spec.guided:
            return None
        return next_guidance_cube(spec, self.structure)

    def _seal(self, outcome: Outcome):
        if not self.active:
            raise NoActiveTask(f"session is {self.phase.value}")
        self.records.append(self.current_record.sealed(outcome))
        if self.task_index + 1 < len(self.tasks):
            self.task_index += 1
            self._open_record(self.task_index)
            self.phase = Phase.PRESENTING
        else:
            self.phase = Phase.DONE

    def advance(self):
        """Participant declared the match done; move to the next task."""
        self._seal(Outcome.COMPLETED)

    def abort_task(self):
        """Assessor stopped the task; move to the next task."""
        self._seal(Outcome.STOPPED)


# ---------------------------------------------------------------------------
# task library files
#
# JSON: {"tasks": [{"task_id", "kind", "prototype": <shape file>,
#                   "initial": <shape file, optional>}]}
# Shape file paths are relative to the library file.  Reshape tasks default
# to the packaged 7-cube starting structure.


def load_library(path: str | Path) -> list[TaskSpec]:
    path = Path(path)
    if not path.is_file():
        raise InvalidLibrary(f"library file {path} does not exist")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InvalidLibrary(f"library {path} is not valid JSON: {e}") from None
    entries = doc.get("tasks")
    if not isinstance(entries, list) or not entries:
        raise InvalidLibrary(f"library {path} lists no tasks")

    specs = []
    problems = []
    for entry in entries:
        try:
            proto_file = load_shape(path.parent / entry["prototype"])
            kind = TaskKind(entry["kind"])
            if "initial" in entry:
                initial = load_shape(path.parent / entry["initial"]).cells
            elif kind is TaskKind.RESHAPE:
                initial = default_reshape_start()
            else:
                initial = BASE_ONLY
            spec = TaskSpec(
                task_id=str(entry["task_id"]),
                kind=kind,
                prototype=proto_file.cells,
                prototype_id=proto_file.shape_id or Path(entry["prototype"]).stem,
                initial=initial,
            )
        except (KeyError, ValueError, OSError) as e:
            problems.append(f"{entry.get('task_id', '?')}: {e}")
            continue
        for v in validate_task(spec):
            problems.append(f"{spec.task_id}: {v.code}: {v.message}")
        specs.append(spec)
    if problems:
        raise InvalidLibrary("; ".join(problems))
    return specs


def default_library_path() -> Path:
    return Path(str(resources.files("cubeassess").joinpath("data/library/tasks.json")))


# ---------------------------------------------------------------------------
# session export: a directory of per-task logs plus a manifest


def task_log_name(index: int, task_id: str) -> str:
    return f"task_{index:02d}_{task_id}.jsonl"


def session_manifest(session: Session) -> dict:
    tasks = []
    for i, spec in enumerate(session.tasks):
        sealed = session.records[i] if i < len(session.records) else None
        tasks.append(
            {
                "index": i,
                "task_id": spec.task_id,
                "kind": spec.kind.value,
                "prototype_id": spec.prototype_id,
                "prototype_cells": sorted(list(c) for c in spec.prototype),
                "initial_cells": sorted(list(c) for c in spec.initial),
                "log": task_log_name(i, spec.task_id),
                "outcome": sealed.outcome.value if sealed and sealed.outcome else None,
            }
        )
    return {
        "session_id": session.session_id,
        "participant_code": session.participant_code,
        "group": session.group,
        "phase": session.phase.value,
        "tasks": tasks,
    }


def export_session(session: Session, directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "manifest.json").write_text(
        json.dumps(session_manifest(session), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    for i, record in enumerate(session.records):
        (directory / task_log_name(i, record.task_id)).write_text(
            dump_record(record), encoding="utf-8"
        )
    # an unfinished task still has its partial log on disk
    if session.active and session.current_record.events:
        i = session.task_index
        (directory / task_log_name(i, session.current_record.task_id)).write_text(
            dump_record(session.current_record), encoding="utf-8"
        )
    return directory


@dataclass(frozen=True)
class SessionArtifacts:
    manifest: dict
    records: list[TaskRecord]
    prototypes: dict[str, Polycube]  # task_id -> prototype cells


def load_session_dir(directory: str | Path) -> SessionArtifacts:
    directory = Path(directory)
    manifest = json.loads((directory / "manifest.json").read_text(encoding="utf-8"))
    records = []
    prototypes = {}
    for entry in manifest["tasks"]:
        prototypes[entry["task_id"]] = geometry.poly(entry["prototype_cells"])
        log = directory / entry["log"]
        if log.is_file():
            records.append(load_record(log))
    return SessionArtifacts(manifest=manifest, records=records, prototypes=prototypes)


def iter_session_dirs(root: str | Path) -> Iterator[Path]:
    for p in sorted(Path(root).iterdir()):
        if p.is_dir() and (p / "manifest.json").is_file():
            yield p
