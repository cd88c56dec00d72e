"""Reproducible experiment runners, one per acceptance family."""

from __future__ import annotations

from typing import Callable

from .report import RunReport
from . import claims, dimension, evolve, gauss, maximal

RUNNERS: dict[str, Callable[[dict, int], RunReport]] = {
    "gauss": gauss.run,
    "evolve": evolve.run,
    "claims": claims.run,
    "dimension": dimension.run,
    "maximal": maximal.run,
}

# Each numbered acceptance criterion is executable by exactly one experiment.
CRITERION_TO_EXPERIMENT: dict[int, str] = {
    1: "gauss",
    2: "evolve",
    3: "claims",
    4: "claims",
    5: "claims",
    6: "gauss",
    7: "gauss",
    8: "dimension",
    9: "dimension",
    10: "dimension",
    11: "dimension",
    12: "maximal",
    13: "maximal",
    14: "maximal",
}
