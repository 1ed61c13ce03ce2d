"""Random integer generation game, two randomness beacons built on it, and a simulator."""

from .errors import (
    AvailabilityFailure,
    EpochAborted,
    InsufficientShares,
    InvalidParameters,
    PhaseError,
    RigError,
    ScenarioError,
    TimingViolation,
    VerificationError,
)
from .game import GameParams, build_matrix, matrix_entry, rig_matrix

__version__ = "0.1.0"

__all__ = [
    "AvailabilityFailure",
    "EpochAborted",
    "GameParams",
    "InsufficientShares",
    "InvalidParameters",
    "PhaseError",
    "RigError",
    "ScenarioError",
    "TimingViolation",
    "VerificationError",
    "build_matrix",
    "matrix_entry",
    "rig_matrix",
]
