"""Cube-construction assessment toolkit.

Simulates a networked building-block interface, scores built structures
against target prototypes with an exact rotation/translation-maximized
similarity, replays event logs into four per-task measures, and ships a
session service, CLI, and analysis pipeline on top.
"""

__version__ = "0.1.0"

from .errors import CubeError
from .geometry import Polycube, canonical_form, rotation_group, shape_type
from .measures import MeasureSet, compute_measures
from .similarity import best_similarity, score_given_overlap

__all__ = [
    "CubeError",
    "Polycube",
    "MeasureSet",
    "best_similarity",
    "canonical_form",
    "compute_measures",
    "rotation_group",
    "score_given_overlap",
    "shape_type",
    "__version__",
]
