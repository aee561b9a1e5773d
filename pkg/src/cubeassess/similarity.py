"""Structural similarity between a built structure and a prototype.

The score for one placement is

    100 * (|i|/|p| - (|s| - |i|)/|p|)

where i is the overlap between the placed structure s and the prototype p:
matching cubes count for, extra cubes count against, both normalized by the
prototype size.  best_similarity maximizes this over all 24 rotations and
every translation whose bounding boxes can overlap.

Values are exact rationals (denominator |p|) so ties and 100-vs-almost-100
comparisons never hinge on float rounding.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from . import geometry
from .errors import EmptyPrototype, EmptyShape
from .events import TaskRecord, replay
from .geometry import Cell, Polycube, Rotation


@dataclass(frozen=True)
class Placement:
    rotation: Rotation
    offset: Cell


IDENTITY_PLACEMENT = Placement(geometry.IDENTITY, (0, 0, 0))


@dataclass(frozen=True)
class SimilarityScore:
    value: Fraction  # percent
    placement: Placement
    intersection: int
    s_size: int
    p_size: int

    @property
    def percent(self) -> float:
        return float(self.value)


def place(s: Polycube, placement: Placement) -> Polycube:
    return geometry.transform(s, placement.rotation, placement.offset)


def overlap(s: Polycube, placement: Placement, p: Polycube) -> int:
    """Number of cells the placed structure shares with the prototype."""
    if not s:
        raise EmptyShape("overlap of an empty structure is undefined")
    if not p:
        raise EmptyShape("overlap with an empty prototype is undefined")
    return len(place(s, placement) & p)


def score_given_overlap(i_size: int, s_size: int, p_size: int) -> Fraction:
    """The similarity formula for known sizes, as an exact rational percent."""
    if p_size == 0:
        raise EmptyPrototype("prototype has no cells")
    if not 0 <= i_size <= min(s_size, p_size):
        raise ValueError(f"impossible overlap {i_size} for |s|={s_size}, |p|={p_size}")
    return Fraction(100 * (2 * i_size - s_size), p_size)


def best_similarity(s: Polycube, p: Polycube) -> SimilarityScore:
    """Maximum similarity over every rotation and translation of s.

    Deterministic: among equal-scoring placements the first one in
    (rotation index, offset lexicographic) order wins, matching a plain
    exhaustive sweep of the overlap-feasible offset window.

    An empty s scores exactly 0 (both formula terms vanish).
    """
    if not p:
        raise EmptyPrototype("prototype has no cells")
    if not s:
        return SimilarityScore(Fraction(0), IDENTITY_PLACEMENT, 0, 0, len(p))

    s_size, p_size = len(s), len(p)
    best_count = -1
    best_placement = IDENTITY_PLACEMENT
    for rot in geometry.rotation_group():
        rotated = [geometry.apply_rotation(rot, c) for c in s]
        # Every offset with nonzero overlap maps some rotated cell onto some
        # prototype cell, so counting cell-pair differences enumerates exactly
        # the overlap-feasible window that matters.
        counts: Counter[Cell] = Counter()
        for rc in rotated:
            for pc in p:
                counts[(pc[0] - rc[0], pc[1] - rc[1], pc[2] - rc[2])] += 1
        top = max(counts.values())
        if top > best_count:
            best_count = top
            offset = min(off for off, n in counts.items() if n == top)
            best_placement = Placement(rot, offset)
    return SimilarityScore(
        value=score_given_overlap(best_count, s_size, p_size),
        placement=best_placement,
        intersection=best_count,
        s_size=s_size,
        p_size=p_size,
    )


def similarity_trace(record: TaskRecord, p: Polycube) -> list[tuple[float, Fraction]]:
    """Similarity after every event, plus a point for the starting structure.

    The t=0 entry scores the structure as presented (normally the bare base
    cube), so a trace always has len(events) + 1 points.
    """
    states = replay(record)
    trace = [(0.0, best_similarity(states[0], p).value)]
    for ev, state in zip(record.events, states[1:]):
        trace.append((ev.t, best_similarity(state, p).value))
    return trace
