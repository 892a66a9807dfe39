"""Exact truncated matrix Laurent series and singularity confinement for matrix dPI."""

from pclab.errors import (
    BadPartition,
    ConfigError,
    DegenerateData,
    DimensionMismatch,
    InsufficientTruncation,
    NonSquare,
    PclabError,
    RankMismatch,
    Singular,
    SingularBlock,
    SingularD,
    SingularToWindow,
    SizeMismatch,
    WindowGrow,
)
from pclab.scalar import Scalar
from pclab.matrix import BlockPartition, Mat
from pclab.series import LaurentSeries, SeriesClass

__version__ = "0.1.0"

__all__ = [
    "BadPartition",
    "BlockPartition",
    "ConfigError",
    "DegenerateData",
    "DimensionMismatch",
    "InsufficientTruncation",
    "LaurentSeries",
    "Mat",
    "NonSquare",
    "PclabError",
    "RankMismatch",
    "Scalar",
    "SeriesClass",
    "Singular",
    "SingularBlock",
    "SingularD",
    "SingularToWindow",
    "SizeMismatch",
    "WindowGrow",
]
