"""Finite combinatorics of Ã₂ buildings: balls, crazy diamonds, embedding
counts, exact prouniform measures and boundary dynamics at finite depth."""

from .errors import (
    A2LabError,
    ConstructionError,
    DepthInsufficientError,
    InputError,
    MeasureViolation,
    StructureError,
    SymmetryViolation,
    ViolationError,
)

__version__ = "0.1.0"

__all__ = [
    "A2LabError",
    "ConstructionError",
    "DepthInsufficientError",
    "InputError",
    "MeasureViolation",
    "StructureError",
    "SymmetryViolation",
    "ViolationError",
]
