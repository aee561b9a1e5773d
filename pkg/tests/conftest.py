import random

import pytest
from hypothesis import strategies as st

from cubeassess.geometry import Polycube, poly, random_connected_polycube

L_TROMINO = poly([(0, 0, 0), (1, 0, 0), (1, 1, 0)])
X_DOMINO = poly([(0, 0, 0), (1, 0, 0)])
Z_DOMINO = poly([(0, 0, 0), (0, 0, 1)])
X_LINE_3 = poly([(0, 0, 0), (1, 0, 0), (2, 0, 0)])
SINGLE = poly([(0, 0, 0)])

# 2x2x2 block missing the (1,1,1) corner: 7 cells, 3D, base-rooted
SEVEN_BLOCK = poly(
    [(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1) if (x, y, z) != (1, 1, 1)]
)


def grown_polycube(seed: int, n_cells: int) -> Polycube:
    return random_connected_polycube(random.Random(seed), n_cells)


@st.composite
def polycubes(draw, min_cells=1, max_cells=8) -> Polycube:
    n = draw(st.integers(min_cells, max_cells))
    seed = draw(st.integers(0, 2**32 - 1))
    return grown_polycube(seed, n)


@pytest.fixture
def rng():
    return random.Random(20260809)
