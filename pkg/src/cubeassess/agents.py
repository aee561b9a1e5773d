"""Synthetic participants for desk-scale experiments.

Three builder profiles stand in for participant groups with different
paces and steadiness:

  monotone  straight to the target, never removing a cube
  slow      same strategy, longer pauses between actions
  erratic   wanders: grows an off-target arm until similarity visibly
            drops, tears it down, then finishes

All builders are driven by a seeded RNG; the same profile and task list
always produce byte-identical logs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from .events import BASE_CELL, Action, TaskEvent
from .geometry import Cell, Polycube
from .similarity import best_similarity
from .tasks import Session, TaskSpec, construction_step


class AgentKind(str, Enum):
    MONOTONE = "monotone"
    SLOW = "slow"
    ERRATIC = "erratic"


_DEFAULT_DELAYS = {
    AgentKind.MONOTONE: (2.0, 8.0),
    AgentKind.SLOW: (8.0, 16.0),
    AgentKind.ERRATIC: (2.0, 8.0),
}


@dataclass(frozen=True)
class AgentProfile:
    kind: AgentKind
    seed: int
    delay: tuple[float, float] | None = None  # uniform inter-event delay, seconds

    @property
    def delay_range(self) -> tuple[float, float]:
        return self.delay if self.delay else _DEFAULT_DELAYS[self.kind]


class _Clock:
    def __init__(self, rng: random.Random, delay: tuple[float, float]):
        self.rng = rng
        self.delay = delay
        self.t = 0.0

    def tick(self) -> float:
        self.t = round(self.t + self.rng.uniform(*self.delay), 3)
        return self.t


class _Builder:
    """Tracks the growing structure and hands out cube ids per cell."""

    def __init__(self, spec: TaskSpec, clock: _Clock):
        self.prototype = spec.prototype
        self.structure: Polycube = spec.initial
        self.clock = clock
        self.ids = {BASE_CELL: 0}
        for i, cell in enumerate(sorted(spec.initial - {BASE_CELL}), start=1):
            self.ids[cell] = i
        self.next_id = len(spec.initial)
        self.events: list[TaskEvent] = []

    def connect(self, cell: Cell):
        self.ids[cell] = self.next_id
        self.next_id += 1
        self.events.append(
            TaskEvent(self.clock.tick(), Action.CONNECT, cell, self.ids[cell])
        )
        self.structure = self.structure | {cell}

    def disconnect(self, cell: Cell):
        self.events.append(
            TaskEvent(self.clock.tick(), Action.DISCONNECT, cell, self.ids.pop(cell))
        )
        self.structure = self.structure - {cell}

    def value(self):
        return best_similarity(self.structure, self.prototype).value

    def follow_plan(self):
        """Apply construction steps until the prototype is matched."""
        while (step := construction_step(self.prototype, self.structure)) is not None:
            if step.action is Action.CONNECT:
                self.connect(step.cell)
            else:
                self.disconnect(step.cell)


def _wrong_arm_cells(structure: Polycube):
    """An endless straight run of cells beyond the structure's +x extent."""
    anchor = max(structure, key=lambda c: (c[0], c[1], c[2]))
    k = 1
    while True:
        yield (anchor[0] + k, anchor[1], anchor[2])
        k += 1


def build_task_events(spec: TaskSpec, profile: AgentProfile, task_index: int) -> list[TaskEvent]:
    """The full event list one agent produces for one task."""
    rng = random.Random(profile.seed * 1_000_003 + task_index)
    clock = _Clock(rng, profile.delay_range)
    b = _Builder(spec, clock)

    if profile.kind in (AgentKind.MONOTONE, AgentKind.SLOW):
        b.follow_plan()
        return b.events

    # erratic: one correct move, then an off-target arm until similarity
    # strictly drops below the pre-arm value, tear it down, then finish
    step = construction_step(spec.prototype, b.structure)
    if step is not None:
        if step.action is Action.CONNECT:
            b.connect(step.cell)
        else:
            b.disconnect(step.cell)
    if construction_step(spec.prototype, b.structure) is not None:
        before_arm = b.value()
        arm: list[Cell] = []
        for cell in _wrong_arm_cells(b.structure):
            arm.append(cell)
            b.connect(cell)
            if b.value() < before_arm:
                break
        for cell in reversed(arm):
            b.disconnect(cell)
    b.follow_plan()
    return b.events


def run_agent_session(
    profile: AgentProfile,
    tasks: list[TaskSpec],
    session_id: str,
    participant_code: str,
) -> Session:
    """Simulate a whole session; every task ends completed by the agent."""
    session = Session(session_id, participant_code, tasks, group=profile.kind.value)
    for i, spec in enumerate(tasks):
        for event in build_task_events(spec, profile, i):
            session.apply_event(event)
        session.advance()
    return session
