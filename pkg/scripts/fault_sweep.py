#!/usr/bin/env python3
"""Fault-injection sweep: how corrupted event streams surface downstream.

Usage: python3 scripts/fault_sweep.py [trials]

Builds seeded 20-event build-and-teardown streams, injects every drop /
duplicate / swap position, and tabulates which error each corruption
produces on replay.  Drops of the final event are the known-undetectable
case (nothing after them can contradict); everything else must error.
"""

import random
import sys
from collections import Counter

from cubeassess.errors import CubeError
from cubeassess.events import TaskRecord, replay
from cubeassess.geometry import poly
from cubeassess.network import (
    CubeNetwork,
    CubeUnit,
    Drop,
    Duplicate,
    Swap,
    face_for_step,
    inject_fault,
    replay_net_events,
    to_task_events,
)

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 25
rng = random.Random(1)


def chain_stream():
    while True:
        net = CubeNetwork()
        cells = [(0, 0, 0)]
        for i in range(1, 11):
            x, y, z = cells[-1]
            options = [
                (x + dx, y + dy, z + dz)
                for dx, dy, dz in ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))
                if (x + dx, y + dy, z + dz) not in cells
            ]
            if not options:
                break
            nxt = options[rng.randrange(len(options))]
            net.attach(CubeUnit.with_default_faces(i), i - 1, face_for_step(cells[-1], nxt), t=float(i))
            cells.append(nxt)
        else:
            for k, cube in enumerate(range(10, 0, -1)):
                net.detach(cube, t=float(20 + k))
            return net.events


def error_for(stream):
    try:
        replay(TaskRecord(
            task_id="t", prototype_id="p", participant_code="sweep",
            initial=poly([(0, 0, 0)]), events=tuple(to_task_events(stream)),
        ))
        replay_net_events(stream)
    except CubeError as e:
        return e.code
    return None


outcomes = Counter()
for _ in range(trials):
    stream = chain_stream()
    n = len(stream)
    for i in range(n):
        outcomes[("drop", error_for(inject_fault(stream, Drop(i))))] += 1
        outcomes[("duplicate", error_for(inject_fault(stream, Duplicate(i))))] += 1
    for _ in range(n):
        i, j = rng.randrange(n), rng.randrange(n)
        outcomes[("swap", error_for(inject_fault(stream, Swap(i, j))))] += 1

print(f"{'fault':<10} {'result':<24} count")
for (fault, code), count in sorted(outcomes.items(), key=lambda kv: (kv[0][0], -kv[1])):
    print(f"{fault:<10} {code or 'no error (valid)':<24} {count}")
