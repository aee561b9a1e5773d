"""Simulated cube-network sensing layer.

Cubes snap together face to face, forming a connection graph rooted at the
base cube (id 0, fixed at the origin).  Because every cube is the same size
and connectors mate with zero twist, the link topology alone determines the
collective shape: reconstruct_shape replays it as a breadth-first walk.

Detaching a cube that other cubes depend on cascades: every cube losing its
path to the base emits its own disconnect, deepest first, so any prefix of
the emitted event stream is still a valid build history.

The simulator is a single-owner state machine; snapshots are immutable.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .errors import (
    BaseRemoval,
    CellOccupied,
    Collision,
    DanglingLink,
    DisconnectsStructure,
    FaceOccupied,
    HostUnreachable,
    UnknownCube,
)
from .events import Action, TaskEvent
from .geometry import Cell, Polycube

BASE_ID = 0


class Face(str, Enum):
    PX = "+x"
    NX = "-x"
    PY = "+y"
    NY = "-y"
    PZ = "+z"
    NZ = "-z"

    @property
    def vector(self) -> Cell:
        return _FACE_VECTORS[self]

    @property
    def opposite(self) -> "Face":
        return _OPPOSITES[self]


_FACE_VECTORS = {
    Face.PX: (1, 0, 0),
    Face.NX: (-1, 0, 0),
    Face.PY: (0, 1, 0),
    Face.NY: (0, -1, 0),
    Face.PZ: (0, 0, 1),
    Face.NZ: (0, 0, -1),
}
_OPPOSITES = {
    Face.PX: Face.NX,
    Face.NX: Face.PX,
    Face.PY: Face.NY,
    Face.NY: Face.PY,
    Face.PZ: Face.NZ,
    Face.NZ: Face.PZ,
}

FACE_ORDER = tuple(Face)


def face_for_step(a: Cell, b: Cell) -> Face:
    """The face of the cube at a that points at the adjacent cell b."""
    d = (b[0] - a[0], b[1] - a[1], b[2] - a[2])
    for f, v in _FACE_VECTORS.items():
        if v == d:
            return f
    raise ValueError(f"cells {a} and {b} are not face-adjacent")


@dataclass(frozen=True)
class CubeUnit:
    cube_id: int
    face_ids: tuple[int, int, int, int, int, int]  # indexed by FACE_ORDER

    @classmethod
    def with_default_faces(cls, cube_id: int) -> "CubeUnit":
        return cls(cube_id, tuple(cube_id * 6 + i for i in range(6)))


Port = tuple[int, Face]  # (cube_id, face direction)
Link = tuple[Port, Port]  # normalized: smaller (cube_id, face value) first


def make_link(a: Port, b: Port) -> Link:
    ka, kb = (a[0], a[1].value), (b[0], b[1].value)
    return (a, b) if ka <= kb else (b, a)


@dataclass(frozen=True)
class TopologyGraph:
    """Immutable snapshot of the sensed connection graph."""

    cube_ids: frozenset[int]
    links: frozenset[Link]


class NetEventKind(str, Enum):
    CONNECT = "connect"
    DISCONNECT = "disconnect"
    DISCOVERY_REPLY = "discovery_reply"


@dataclass(frozen=True)
class NetEvent:
    t: float
    kind: NetEventKind
    cube_id: int
    cell: Cell
    # for connects: the host port this cube snapped onto
    host: Port | None = None


class CubeNetwork:
    """Live simulator state: registered cubes, links, and emitted events."""

    def __init__(self):
        base = CubeUnit.with_default_faces(BASE_ID)
        self.cubes: dict[int, CubeUnit] = {BASE_ID: base}
        self.links: set[Link] = set()
        self.cells: dict[int, Cell] = {BASE_ID: (0, 0, 0)}
        self.events: list[NetEvent] = []
        self._used_face_ids: set[int] = set(base.face_ids)

    # -- queries ----------------------------------------------------------

    def snapshot(self) -> TopologyGraph:
        return TopologyGraph(frozenset(self.cubes), frozenset(self.links))

    def shape(self) -> Polycube:
        return frozenset(self.cells.values())

    def _port_taken(self, port: Port) -> bool:
        return any(port in link for link in self.links)

    def _neighbors(self, cube_id: int) -> list[tuple[int, Face]]:
        """(neighbor id, face on cube_id pointing at it), deterministic order."""
        out = []
        for (ca, fa), (cb, fb) in self.links:
            if ca == cube_id:
                out.append((cb, fa))
            elif cb == cube_id:
                out.append((ca, fb))
        return sorted(out, key=lambda nf: (nf[0], nf[1].value))

    def broadcast_scan(self, t: float | None = None) -> list[int]:
        """Cube ids reachable from the base, in breadth-first order.

        When given a timestamp, also logs one discovery reply per cube.
        """
        order = [BASE_ID]
        seen = {BASE_ID}
        queue = deque(order)
        while queue:
            cur = queue.popleft()
            for nb, _ in self._neighbors(cur):
                if nb not in seen:
                    seen.add(nb)
                    order.append(nb)
                    queue.append(nb)
        if t is not None:
            for cid in order:
                self.events.append(
                    NetEvent(t, NetEventKind.DISCOVERY_REPLY, cid, self.cells[cid])
                )
        return order

    def _distances(self) -> dict[int, int]:
        dist = {BASE_ID: 0}
        queue = deque([BASE_ID])
        while queue:
            cur = queue.popleft()
            for nb, _ in self._neighbors(cur):
                if nb not in dist:
                    dist[nb] = dist[cur] + 1
                    queue.append(nb)
        return dist

    # -- mutations --------------------------------------------------------

    def attach(
        self, new_cube: CubeUnit, host_cube_id: int, host_face: Face, t: float = 0.0
    ) -> tuple[NetEvent, Cell]:
        if host_cube_id not in self.cubes:
            raise HostUnreachable(f"host cube {host_cube_id} is not on the network")
        hx, hy, hz = self.cells[host_cube_id]
        dx, dy, dz = host_face.vector
        cell = (hx + dx, hy + dy, hz + dz)
        if cell in self.cells.values():
            raise CellOccupied(f"cell {cell} is already filled via another path")
        host_port: Port = (host_cube_id, host_face)
        if self._port_taken(host_port):
            raise FaceOccupied(f"face {host_face.value} of cube {host_cube_id} is already linked")
        if new_cube.cube_id in self.cubes:
            raise ValueError(f"cube id {new_cube.cube_id} already attached")
        if self._used_face_ids & set(new_cube.face_ids):
            raise ValueError(f"cube {new_cube.cube_id} reuses face ids already on the network")

        self.cubes[new_cube.cube_id] = new_cube
        self._used_face_ids |= set(new_cube.face_ids)
        self.links.add(make_link(host_port, (new_cube.cube_id, host_face.opposite)))
        self.cells[new_cube.cube_id] = cell
        event = NetEvent(t, NetEventKind.CONNECT, new_cube.cube_id, cell, host=host_port)
        self.events.append(event)
        return event, cell

    def detach(self, cube_id: int, t: float = 0.0, spacing: float = 0.001) -> list[NetEvent]:
        """Remove a cube; orphaned cubes cascade off deepest-first.

        Cascade events are spaced `spacing` seconds apart so downstream
        measures never see two actions at the same instant.
        """
        if cube_id == BASE_ID:
            raise BaseRemoval("the base cube cannot be detached")
        if cube_id not in self.cubes:
            raise UnknownCube(f"cube {cube_id} is not on the network")
        dist = self._distances()
        survivors = self._reachable_without(cube_id)
        doomed = [cid for cid in self.cubes if cid not in survivors]
        doomed.sort(key=lambda cid: (-dist[cid], cid))
        assert doomed[-1] == cube_id  # the detached cube is always shallowest

        emitted = []
        for k, cid in enumerate(doomed):
            self.links = {l for l in self.links if l[0][0] != cid and l[1][0] != cid}
            unit = self.cubes.pop(cid)
            self._used_face_ids -= set(unit.face_ids)
            cell = self.cells.pop(cid)
            event = NetEvent(round(t + k * spacing, 6), NetEventKind.DISCONNECT, cid, cell)
            self.events.append(event)
            emitted.append(event)
        return emitted

    def _reachable_without(self, removed: int) -> set[int]:
        seen = {BASE_ID}
        queue = deque([BASE_ID])
        while queue:
            cur = queue.popleft()
            for nb, _ in self._neighbors(cur):
                if nb != removed and nb not in seen:
                    seen.add(nb)
                    queue.append(nb)
        return seen


def build_network(shape: Polycube, t0: float = 0.0, spacing: float = 1.0) -> CubeNetwork:
    """Attach cubes for a base-rooted shape in breadth-first cell order."""
    if (0, 0, 0) not in shape:
        raise ValueError("shape must contain the base cell (0,0,0)")
    net = CubeNetwork()
    placed = {(0, 0, 0): BASE_ID}
    queue = deque([(0, 0, 0)])
    next_id = 1
    t = t0
    while queue:
        cell = queue.popleft()
        for f in FACE_ORDER:
            dx, dy, dz = f.vector
            nb = (cell[0] + dx, cell[1] + dy, cell[2] + dz)
            if nb in shape and nb not in placed:
                net.attach(CubeUnit.with_default_faces(next_id), placed[cell], f, round(t, 6))
                placed[nb] = next_id
                next_id += 1
                t += spacing
                queue.append(nb)
    return net


# ---------------------------------------------------------------------------
# reconstruction


def reconstruct_shape(graph: TopologyGraph) -> tuple[Polycube, dict[int, Cell]]:
    """Derive the collective shape from link topology alone.

    Breadth-first from the base cube at the origin; a link on face +d of a
    placed cube puts its neighbor one step along +d.  Raises Collision when
    two cubes demand one cell (or one cube is forced onto two cells) and
    DanglingLink when a link mentions an unregistered cube.
    """
    adjacency: dict[int, list[tuple[int, Face]]] = {cid: [] for cid in graph.cube_ids}
    for (ca, fa), (cb, fb) in graph.links:
        if ca not in graph.cube_ids or cb not in graph.cube_ids:
            missing = ca if ca not in graph.cube_ids else cb
            raise DanglingLink(f"link references absent cube {missing}")
        if fa.opposite is not fb:
            raise Collision(f"cubes {ca} and {cb} linked on non-opposite faces")
        adjacency[ca].append((cb, fa))
        adjacency[cb].append((ca, fb))

    cells: dict[int, Cell] = {BASE_ID: (0, 0, 0)}
    occupied: dict[Cell, int] = {(0, 0, 0): BASE_ID}
    queue = deque([BASE_ID])
    while queue:
        cur = queue.popleft()
        cx, cy, cz = cells[cur]
        for nb, face in sorted(adjacency[cur], key=lambda nf: (nf[0], nf[1].value)):
            dx, dy, dz = face.vector
            cell = (cx + dx, cy + dy, cz + dz)
            if nb in cells:
                if cells[nb] != cell:
                    raise Collision(f"cube {nb} is forced onto both {cells[nb]} and {cell}")
                continue
            if cell in occupied:
                raise Collision(f"cubes {occupied[cell]} and {nb} both demand cell {cell}")
            cells[nb] = cell
            occupied[cell] = nb
            queue.append(nb)
    return frozenset(cells.values()), cells


# ---------------------------------------------------------------------------
# event-stream plumbing: serialization, conversion, fault injection


def to_task_events(net_events: Iterable[NetEvent]) -> list[TaskEvent]:
    """Strip network-only fields; discovery replies carry no action."""
    out = []
    for ev in net_events:
        if ev.kind is NetEventKind.DISCOVERY_REPLY:
            continue
        out.append(
            TaskEvent(
                t=ev.t,
                action=Action.CONNECT if ev.kind is NetEventKind.CONNECT else Action.DISCONNECT,
                cell=ev.cell,
                cube_id=ev.cube_id,
            )
        )
    return out


def net_event_line(ev: NetEvent) -> str:
    obj = {
        "t": ev.t,
        "action": ev.kind.value,
        "x": ev.cell[0],
        "y": ev.cell[1],
        "z": ev.cell[2],
        "cube_id": ev.cube_id,
        "face": f"{ev.host[0]}:{ev.host[1].value}" if ev.host else None,
    }
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def dump_net_events(events: Iterable[NetEvent]) -> str:
    return "\n".join(net_event_line(e) for e in events) + "\n"


def parse_net_events(text: str) -> list[NetEvent]:
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        host = None
        if obj.get("face"):
            host_id, face = obj["face"].split(":")
            host = (int(host_id), Face(face))
        out.append(
            NetEvent(
                t=float(obj["t"]),
                kind=NetEventKind(obj["action"]),
                cube_id=int(obj["cube_id"]),
                cell=(int(obj["x"]), int(obj["y"]), int(obj["z"])),
                host=host,
            )
        )
    return out


def replay_net_events(events: Iterable[NetEvent]) -> CubeNetwork:
    """Rebuild a network from a recorded stream, validating every step.

    A valid stream only ever disconnects cubes nothing else depends on
    (cascades arrive pre-expanded), so a dependent-orphaning disconnect is
    reported as corruption rather than silently re-cascaded.
    """
    net = CubeNetwork()
    for ev in events:
        if ev.kind is NetEventKind.CONNECT:
            if ev.host is None:
                raise DanglingLink(f"connect of cube {ev.cube_id} carries no host port")
            net.attach(CubeUnit.with_default_faces(ev.cube_id), ev.host[0], ev.host[1], ev.t)
        elif ev.kind is NetEventKind.DISCONNECT:
            if ev.cube_id not in net.cubes:
                raise UnknownCube(f"disconnect of unknown cube {ev.cube_id}")
            if len(net._reachable_without(ev.cube_id)) != len(net.cubes) - 1:
                raise DisconnectsStructure(
                    f"stream disconnects cube {ev.cube_id} while others depend on it"
                )
            net.detach(ev.cube_id, ev.t)
    return net


@dataclass(frozen=True)
class Drop:
    index: int


@dataclass(frozen=True)
class Duplicate:
    index: int


@dataclass(frozen=True)
class Swap:
    i: int
    j: int


Fault = Drop | Duplicate | Swap


def inject_fault(stream: Sequence[NetEvent], fault: Fault) -> list[NetEvent]:
    """Perturb an event stream; corruption is caught downstream, not here."""
    out = list(stream)
    if isinstance(fault, Drop):
        del out[fault.index]
    elif isinstance(fault, Duplicate):
        out.insert(fault.index + 1, out[fault.index])
    elif isinstance(fault, Swap):
        out[fault.i], out[fault.j] = out[fault.j], out[fault.i]
    else:
        raise TypeError(f"unknown fault {fault!r}")
    return out
