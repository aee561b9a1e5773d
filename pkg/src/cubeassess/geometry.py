"""Exact integer polycube geometry.

Shapes live on the unit cube grid: a polycube is a frozenset of integer
(x, y, z) cells.  All orientation handling uses the 24 proper rotations of
the cube (signed axis permutations with determinant +1); reflections are
deliberately excluded so mirror images never match.

Everything here is a pure function on immutable values.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import EmptyShape

Cell = tuple[int, int, int]
# 3x3 matrix as rows; entries in {-1, 0, 1}
Rotation = tuple[tuple[int, int, int], tuple[int, int, int], tuple[int, int, int]]
Polycube = frozenset[Cell]

IDENTITY: Rotation = ((1, 0, 0), (0, 1, 0), (0, 0, 1))

# Face directions in a fixed order: +x, -x, +y, -y, +z, -z
FACE_DIRS: tuple[Cell, ...] = (
    (1, 0, 0),
    (-1, 0, 0),
    (0, 1, 0),
    (0, -1, 0),
    (0, 0, 1),
    (0, 0, -1),
)


def apply_rotation(r: Rotation, cell: Cell) -> Cell:
    x, y, z = cell
    return (
        r[0][0] * x + r[0][1] * y + r[0][2] * z,
        r[1][0] * x + r[1][1] * y + r[1][2] * z,
        r[2][0] * x + r[2][1] * y + r[2][2] * z,
    )


def compose(a: Rotation, b: Rotation) -> Rotation:
    """Matrix product a @ b (apply b first, then a)."""
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3))
        for i in range(3)
    )  # type: ignore[return-value]


def _generate_rotations() -> tuple[Rotation, ...]:
    # 90 degree generators about each axis
    rx: Rotation = ((1, 0, 0), (0, 0, -1), (0, 1, 0))
    ry: Rotation = ((0, 0, 1), (0, 1, 0), (-1, 0, 0))
    rz: Rotation = ((0, -1, 0), (1, 0, 0), (0, 0, 1))
    seen = {IDENTITY}
    frontier = [IDENTITY]
    while frontier:
        nxt = []
        for m in frontier:
            for g in (rx, ry, rz):
                c = compose(g, m)
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    assert len(seen) == 24
    # Fixed, reproducible order: identity first, the rest sorted by entries.
    rest = sorted(seen - {IDENTITY})
    return (IDENTITY,) + tuple(rest)


ROTATIONS: tuple[Rotation, ...] = _generate_rotations()


def rotation_group() -> tuple[Rotation, ...]:
    """All 24 proper rotations of the cube, identity first, in a fixed order."""
    return ROTATIONS


def transform(poly: Polycube, r: Rotation, t: Cell = (0, 0, 0)) -> Polycube:
    """Rotate every cell by r, then translate by t."""
    tx, ty, tz = t
    out = set()
    for c in poly:
        rx, ry, rz = apply_rotation(r, c)
        out.add((rx + tx, ry + ty, rz + tz))
    return frozenset(out)


def translate(poly: Polycube, t: Cell) -> Polycube:
    tx, ty, tz = t
    return frozenset((x + tx, y + ty, z + tz) for x, y, z in poly)


def neighbors(cell: Cell) -> Iterator[Cell]:
    x, y, z = cell
    for dx, dy, dz in FACE_DIRS:
        yield (x + dx, y + dy, z + dz)


def is_adjacent(cell: Cell, poly: Polycube) -> bool:
    return any(n in poly for n in neighbors(cell))


def is_connected(poly: Polycube) -> bool:
    """True iff the face-adjacency graph over the cells is connected."""
    if not poly:
        raise EmptyShape("connectivity of an empty shape is undefined")
    start = next(iter(poly))
    seen = {start}
    stack = [start]
    while stack:
        cur = stack.pop()
        for n in neighbors(cur):
            if n in poly and n not in seen:
                seen.add(n)
                stack.append(n)
    return len(seen) == len(poly)


def bounding_box(poly: Polycube) -> tuple[Cell, Cell]:
    """(min corner, max corner), both inclusive."""
    if not poly:
        raise EmptyShape("bounding box of an empty shape is undefined")
    xs = [c[0] for c in poly]
    ys = [c[1] for c in poly]
    zs = [c[2] for c in poly]
    return (min(xs), min(ys), min(zs)), (max(xs), max(ys), max(zs))


def extents(poly: Polycube) -> tuple[int, int, int]:
    """Bounding-box side lengths in cells."""
    lo, hi = bounding_box(poly)
    return (hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1)


def normalize(poly: Polycube) -> Polycube:
    """Translate so min x, y and z over the cells are each 0."""
    lo, _ = bounding_box(poly)
    return translate(poly, (-lo[0], -lo[1], -lo[2]))


def canonical_form(poly: Polycube) -> Polycube:
    """Rotation-invariant representative of a shape.

    Among the 24 rotated + normalized copies, picks the one whose sorted
    cell list is lexicographically smallest.  Idempotent, and equal for any
    two shapes that differ only by rotation and translation.
    """
    if not poly:
        raise EmptyShape("canonical form of an empty shape is undefined")
    best = None
    best_key = None
    for r in ROTATIONS:
        cand = normalize(transform(poly, r))
        key = tuple(sorted(cand))
        if best_key is None or key < best_key:
            best_key = key
            best = cand
    assert best is not None
    return best


class ShapeType(Enum):
    TWO_D = "2d"
    THREE_D = "3d"


def shape_type(poly: Polycube) -> ShapeType:
    """2D iff the shape fits in a one-cube-thick slab along some axis.

    A single cube counts as 2D (its 1x1x1 box trivially has a unit extent).
    """
    ex = extents(poly)
    return ShapeType.TWO_D if min(ex) == 1 else ShapeType.THREE_D


# ---------------------------------------------------------------------------
# shape generation and enumeration


def random_connected_polycube(
    rng: random.Random,
    n_cells: int,
    kind: ShapeType | None = None,
    max_tries: int = 10_000,
) -> Polycube:
    """Grow a random face-connected polycube of n_cells containing (0,0,0).

    With kind=TWO_D growth is confined to the z=0 plane; with THREE_D
    rejection-samples until the result really spans all three axes (needs
    n_cells >= 4).
    """
    if n_cells < 1:
        raise ValueError("need at least one cell")
    if kind is ShapeType.THREE_D and n_cells < 4:
        raise ValueError("a 3D polycube needs at least 4 cells")
    for _ in range(max_tries):
        cells = {(0, 0, 0)}
        while len(cells) < n_cells:
            frontier = sorted(
                n
                for c in cells
                for n in neighbors(c)
                if n not in cells and (kind is not ShapeType.TWO_D or n[2] == 0)
            )
            cells.add(frontier[rng.randrange(len(frontier))])
        poly = frozenset(cells)
        if kind is None or shape_type(poly) is kind:
            return poly
    raise RuntimeError(f"failed to sample a {kind} polycube of {n_cells} cells")


def enumerate_connected(max_cells: int) -> dict[int, set[Polycube]]:
    """All connected polycubes up to max_cells, one canonical form per shape.

    Plain breadth-first growth with canonical-form deduplication; fine for
    the small sizes used in tests (counts 1, 1, 2, 8, 29, 166, ...).
    """
    by_size: dict[int, set[Polycube]] = {1: {frozenset({(0, 0, 0)})}}
    for n in range(2, max_cells + 1):
        grown: set[Polycube] = set()
        for base in by_size[n - 1]:
            for cell in base:
                for cand in neighbors(cell):
                    if cand not in base:
                        grown.add(canonical_form(base | {cand}))
        by_size[n] = grown
    return by_size


# ---------------------------------------------------------------------------
# prototype shape files
#
# UTF-8 text, one cell per line as "x y z"; '#' starts a comment; an optional
# first header line "prototype <id> [<task-hint>]".


@dataclass(frozen=True)
class ShapeFile:
    cells: Polycube
    shape_id: str | None = None
    hint: str | None = None


def parse_shape(text: str) -> ShapeFile:
    shape_id = None
    hint = None
    cells = set()
    saw_header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "prototype" and not saw_header and not cells:
            saw_header = True
            shape_id = parts[1] if len(parts) > 1 else None
            hint = " ".join(parts[2:]) if len(parts) > 2 else None
            continue
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 'x y z', got {raw!r}")
        try:
            cells.add((int(parts[0]), int(parts[1]), int(parts[2])))
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer coordinate in {raw!r}") from None
    if not cells:
        raise EmptyShape("shape file contains no cells")
    return ShapeFile(cells=frozenset(cells), shape_id=shape_id, hint=hint)


def load_shape(path: str | Path) -> ShapeFile:
    return parse_shape(Path(path).read_text(encoding="utf-8"))


def dump_shape(shape: ShapeFile) -> str:
    lines = []
    if shape.shape_id is not None:
        header = f"prototype {shape.shape_id}"
        if shape.hint:
            header += f" {shape.hint}"
        lines.append(header)
    lines.extend(f"{x} {y} {z}" for x, y, z in sorted(shape.cells))
    return "\n".join(lines) + "\n"


def save_shape(shape: ShapeFile, path: str | Path) -> None:
    Path(path).write_text(dump_shape(shape), encoding="utf-8")


def poly(cells: Iterable[Sequence[int]]) -> Polycube:
    """Convenience: build a Polycube from any iterable of 3-sequences."""
    return frozenset((int(c[0]), int(c[1]), int(c[2])) for c in cells)
