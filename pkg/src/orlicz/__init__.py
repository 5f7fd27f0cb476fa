"""Numerical laboratory for Hardy-Orlicz multiplier constructions."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DomainError,
    GapError,
    LevelExhaustion,
    OrliczError,
    PartitionMismatch,
    PlacementError,
    PositionUnrepresentable,
    RangeError,
    SearchFailure,
    SpecError,
)
from .numerics import Grid, LogScalar, TowerScalar, e_tower, log_sum_exp  # noqa: E402
