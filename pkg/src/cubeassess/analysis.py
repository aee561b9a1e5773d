"""Offline aggregation over exported sessions.

Turns per-task records into a measure table (one row per participant and
task), computes descriptive statistics and Pearson correlations, exports
similarity-vs-time curves as long-format CSV, and merges per-task build
histories into a construction-sequence tree with visit counts.

Inferential statistics (ANOVA, p-values) are deliberately out of scope.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import EmptyTable, LengthMismatch, MixedTasks, TooFewPoints, ZeroVariance
from .events import TaskRecord, replay
from .geometry import Cell, Polycube, canonical_form, shape_type
from .measures import MeasureSet, compute_measures
from .similarity import similarity_trace
from .tasks import SessionArtifacts

MEASURE_NAMES = ("similarity", "last_connect", "derivative", "zero_crossings")


# ---------------------------------------------------------------------------
# correlation


def pearson_r(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient.

    Sums are taken in exact rational arithmetic so perfectly linear inputs
    come out as exactly +/-1.0 (and rational r values like 4/5 survive to
    the closest float).
    """
    if len(xs) != len(ys):
        raise LengthMismatch(f"got {len(xs)} x values but {len(ys)} y values")
    n = len(xs)
    if n < 3:
        raise TooFewPoints(f"need at least 3 points, got {n}")
    fxs = [Fraction(x) for x in xs]
    fys = [Fraction(y) for y in ys]
    mx = sum(fxs) / n
    my = sum(fys) / n
    cov = sum((x - mx) * (y - my) for x, y in zip(fxs, fys))
    vx = sum((x - mx) ** 2 for x in fxs)
    vy = sum((y - my) ** 2 for y in fys)
    if vx == 0 or vy == 0:
        raise ZeroVariance("one input has no variance; correlation is undefined")
    r2 = cov * cov / (vx * vy)
    sign = 1 if cov > 0 else -1
    num, den = r2.numerator, r2.denominator
    sn, sd = math.isqrt(num), math.isqrt(den)
    if sn * sn == num and sd * sd == den:  # exact rational root
        return sign * float(Fraction(sn, sd))
    return sign * math.sqrt(float(r2))


# ---------------------------------------------------------------------------
# measure table and aggregation


@dataclass(frozen=True)
class MeasureRow:
    participant_code: str
    group: str
    task_id: str
    kind: str
    shape: str  # '2d' | '3d'
    measures: MeasureSet

    def value(self, name: str) -> float:
        return float(getattr(self.measures, name))


def measure_table(sessions: Iterable[SessionArtifacts]) -> tuple[list[MeasureRow], list[str]]:
    """One row per (participant, task) record; problems reported, not fatal."""
    rows: list[MeasureRow] = []
    problems: list[str] = []
    for art in sessions:
        kinds = {t["task_id"]: t["kind"] for t in art.manifest["tasks"]}
        for record in art.records:
            label = f"{art.manifest['session_id']}/{record.task_id}"
            if not record.events:
                problems.append(f"{label}: no events, skipped")
                continue
            prototype = art.prototypes[record.task_id]
            try:
                m = compute_measures(record, prototype)
            except Exception as e:  # corrupt log: report and continue
                problems.append(f"{label}: {type(e).__name__}: {e}")
                continue
            rows.append(
                MeasureRow(
                    participant_code=record.participant_code,
                    group=art.manifest.get("group", ""),
                    task_id=record.task_id,
                    kind=kinds.get(record.task_id, ""),
                    shape=shape_type(prototype).value,
                    measures=m,
                )
            )
    return rows, problems


def _mean_sd(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / n  # population variance
    return mean, math.sqrt(var)


def aggregate(
    rows: Sequence[MeasureRow], by: Sequence[str] = ("group",)
) -> dict[tuple, dict[str, tuple[float, float]]]:
    """Per-group (mean, sd) of each measure, grouped by the given factors.

    Factors: participant_code, group, task_id, kind, shape.  Single-row
    groups get sd 0 (population convention).
    """
    if not rows:
        raise EmptyTable("no measure rows to aggregate")
    groups: dict[tuple, list[MeasureRow]] = {}
    for row in rows:
        key = tuple(getattr(row, f) for f in by)
        groups.setdefault(key, []).append(row)
    return {
        key: {
            name: _mean_sd([r.value(name) for r in members])
            for name in MEASURE_NAMES
        }
        for key, members in sorted(groups.items())
    }


def measure_correlations(rows: Sequence[MeasureRow]) -> tuple[list[tuple[str, str, float]], list[str]]:
    """Pairwise Pearson r between the four measures across all rows."""
    out = []
    notes = []
    for i, a in enumerate(MEASURE_NAMES):
        for b in MEASURE_NAMES[i + 1 :]:
            try:
                r = pearson_r([row.value(a) for row in rows], [row.value(b) for row in rows])
                out.append((a, b, r))
            except (TooFewPoints, ZeroVariance) as e:
                notes.append(f"{a} vs {b}: {e.code}: {e}")
    return out, notes


def table_csv(rows: Sequence[MeasureRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["participant_code", "group", "task_id", "kind", "shape_type", *MEASURE_NAMES])
    for row in rows:
        w.writerow(
            [
                row.participant_code,
                row.group,
                row.task_id,
                row.kind,
                row.shape,
                *(repr(row.value(name)) for name in MEASURE_NAMES),
            ]
        )
    return buf.getvalue()


def group_sizes(rows: Sequence[MeasureRow], by: Sequence[str]) -> dict[tuple, int]:
    sizes: dict[tuple, int] = {}
    for row in rows:
        key = tuple(getattr(row, f) for f in by)
        sizes[key] = sizes.get(key, 0) + 1
    return sizes


def aggregate_csv(
    stats: dict[tuple, dict[str, tuple[float, float]]],
    by: Sequence[str],
    sizes: dict[tuple, int] | None = None,
) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    header = [*by]
    for name in MEASURE_NAMES:
        header += [f"{name}_mean", f"{name}_sd"]
    w.writerow(header + ["n"])
    for key, per_measure in stats.items():
        row = list(key)
        for name in MEASURE_NAMES:
            mean, sd = per_measure[name]
            row += [repr(mean), repr(sd)]
        w.writerow(row + [sizes.get(key, "") if sizes else ""])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# similarity curves


def export_curves(
    records: Sequence[TaskRecord], prototypes: dict[str, Polycube]
) -> str:
    """Long-format CSV of every trace point: participant, task, t, similarity."""
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["participant_code", "task_id", "t", "similarity"])
    for record in records:
        for t, value in similarity_trace(record, prototypes[record.task_id]):
            w.writerow([record.participant_code, record.task_id, repr(t), repr(float(value))])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# construction-sequence trees


@dataclass
class SequenceNode:
    canonical: tuple[Cell, ...]  # orientation-free state identity
    cells: tuple[Cell, ...]  # raw cells of the first record that reached it
    action: str | None  # edge label from the parent; None at the root
    count: int = 0
    children: dict[tuple[str, tuple[Cell, ...]], "SequenceNode"] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "canonical": [list(c) for c in self.canonical],
            "cells": [list(c) for c in self.cells],
            "action": self.action,
            "count": self.count,
            "children": [child.to_dict() for _, child in sorted(self.children.items())],
        }


@dataclass(frozen=True)
class SequenceTree:
    task_id: str
    root: SequenceNode

    def node_count(self) -> int:
        def walk(node: SequenceNode) -> int:
            return 1 + sum(walk(c) for c in node.children.values())

        return walk(self.root)

    def to_dict(self) -> dict:
        return {"task_id": self.task_id, "tree": self.root.to_dict()}

    def to_text(self) -> str:
        lines: list[str] = []

        def walk(node: SequenceNode, depth: int):
            label = node.action or "start"
            shape = " ".join(f"({x},{y},{z})" for x, y, z in node.canonical)
            lines.append(f"{'  ' * depth}{label} x{node.count}: {shape}")
            for _, child in sorted(node.children.items()):
                walk(child, depth + 1)

        walk(self.root, 0)
        return "\n".join(lines) + "\n"


def build_sequence_tree(records: Sequence[TaskRecord]) -> SequenceTree:
    """Merge build histories of one task into a trie of canonical states."""
    if not records:
        raise EmptyTable("no records to merge")
    task_ids = {r.task_id for r in records}
    if len(task_ids) > 1:
        raise MixedTasks(f"records span tasks {sorted(task_ids)}")

    first = records[0]
    root = SequenceNode(
        canonical=tuple(sorted(canonical_form(first.initial))),
        cells=tuple(sorted(first.initial)),
        action=None,
    )
    for record in records:
        states = replay(record)
        node = root
        node.count += 1
        for event, state in zip(record.events, states[1:]):
            canon = tuple(sorted(canonical_form(state)))
            key = (event.action.value, canon)
            if key not in node.children:
                node.children[key] = SequenceNode(
                    canonical=canon, cells=tuple(sorted(state)), action=event.action.value
                )
            node = node.children[key]
            node.count += 1
    return SequenceTree(task_id=first.task_id, root=root)
