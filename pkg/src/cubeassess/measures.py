"""The four per-task assessment measures.

From one replayed task we extract:

  similarity      similarity of the final structure to the prototype (percent)
  last_connect    time of the final connect/disconnect event (seconds)
  derivative      mean local slope of the similarity trace (percent/second)
  zero_crossings  sign alternations of that slope; an index of unsteady progress

Slopes are computed over consecutive trace points including the t=0 point,
so the first event contributes a slope.  Zero slopes (a pause) carry the
previous sign and never count as crossings; leading zero slopes are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NoEvents, ZeroDt
from .events import TaskRecord
from .geometry import Polycube
from .similarity import similarity_trace

TracePoint = tuple[float, Fraction]


@dataclass(frozen=True)
class MeasureSet:
    similarity: Fraction  # percent, at task end
    last_connect: float  # seconds
    derivative: Fraction  # percent per second
    zero_crossings: int


def trace_slopes(trace: list[TracePoint]) -> list[Fraction]:
    """Local slope between consecutive trace points, exact.

    Timestamps are converted to rationals via their binary float value, so
    integral and millisecond-rounded times stay exact.
    """
    slopes = []
    for (t0, v0), (t1, v1) in zip(trace, trace[1:]):
        dt = Fraction(t1) - Fraction(t0)
        if dt == 0:
            raise ZeroDt(f"two trace points at t={t1}; need >= 1 ms between events")
        slopes.append((Fraction(v1) - Fraction(v0)) / dt)
    return slopes


def count_zero_crossings(slopes: list[Fraction]) -> int:
    """Strict sign alternations; zero slopes inherit the previous sign."""
    crossings = 0
    last = 0
    for s in slopes:
        sign = (s > 0) - (s < 0)
        if sign == 0:
            continue
        if last != 0 and sign != last:
            crossings += 1
        last = sign
    return crossings


def measures_from_trace(trace: list[TracePoint]) -> MeasureSet:
    """Measures for an explicit similarity trace (t=0 point first)."""
    if len(trace) < 2:
        raise NoEvents("no events: last_connect and derivative are undefined")
    slopes = trace_slopes(trace)
    return MeasureSet(
        similarity=Fraction(trace[-1][1]),
        last_connect=trace[-1][0],
        derivative=sum(slopes, Fraction(0)) / len(slopes),
        zero_crossings=count_zero_crossings(slopes),
    )


def compute_measures(record: TaskRecord, p: Polycube) -> MeasureSet:
    """Replay the record against prototype p and extract all four measures."""
    if not record.events:
        raise NoEvents("no events: last_connect and derivative are undefined")
    return measures_from_trace(similarity_trace(record, p))
