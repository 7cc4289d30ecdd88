"""Streaming estimators for the size of unit-ball covers of point sets."""
from .errors import (
    ConfigError,
    ContractViolation,
    IncompatibleSketch,
    InputError,
    InvalidArgument,
    NotReady,
    OracleLimitExceeded,
    StreamCoverError,
    UnsupportedSource,
)
from .generators import Instance, InstanceKind, InstanceSpec, generate
from .geometry import Norm, Shift, WindowId, enumerate_shifts, window_id
from .practical import LatticeEstimate, LatticeSpec, lattice_estimate
from .shifting import ShiftConfig, ShiftEstimator, ShiftMode, estimate_cover, offline_shift_cover, sampler_count
from .sketches import DistinctSketch
from .solvers import SolverKind, WindowSolverSpec

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "ContractViolation", "IncompatibleSketch", "InputError", "InvalidArgument", "NotReady",
    "OracleLimitExceeded", "StreamCoverError", "UnsupportedSource",
    "Instance", "InstanceKind", "InstanceSpec", "generate",
    "LatticeEstimate", "LatticeSpec", "lattice_estimate",
    "Norm", "Shift", "WindowId", "enumerate_shifts", "window_id",
    "ShiftConfig", "ShiftEstimator", "ShiftMode", "estimate_cover", "offline_shift_cover", "sampler_count",
    "DistinctSketch", "SolverKind", "WindowSolverSpec", "__version__",
]
