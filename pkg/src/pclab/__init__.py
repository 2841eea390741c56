"""Laboratory for injective piecewise contractions of the interval."""

from .attractors import (
    AttractorReport,
    PeriodicOrbit,
    Phantom,
    Undetermined,
    attractor_set,
    direct_attractor_oracle,
    fixed_points,
    tau_cycles,
)
from .backend import FLOAT, RATIONAL, Backend, get_backend
from .errors import (
    InvariantViolation,
    PCLabError,
    QuasiPartitionError,
    ValidationError,
)
from .intervals import Interval, IntervalSet, interval_set
from .maps import (
    Affine,
    BoundaryAssignment,
    BranchSystem,
    ExpandingMap,
    ParameterPoint,
    PiecewiseContraction,
    Quadratic,
    Side,
    build_inverse,
    gap_set,
    pc_image,
    validate_system,
)
from .orbits import ItineraryWord, detect_eventual_period, detect_g_connection, forward_orbit, g_orbit, itinerary
from .quasipartition import (
    QuasiPartition,
    build_quasi_partition,
    gap_hitting_time,
    symbolic_itinerary_from_tau,
    verify_quasi_partition,
)

__version__ = "0.1.0"

__all__ = [
    "Affine",
    "attractor_set",
    "AttractorReport",
    "Backend",
    "BoundaryAssignment",
    "BranchSystem",
    "build_inverse",
    "build_quasi_partition",
    "detect_eventual_period",
    "detect_g_connection",
    "direct_attractor_oracle",
    "ExpandingMap",
    "fixed_points",
    "FLOAT",
    "forward_orbit",
    "g_orbit",
    "gap_hitting_time",
    "gap_set",
    "get_backend",
    "Interval",
    "interval_set",
    "IntervalSet",
    "InvariantViolation",
    "itinerary",
    "ItineraryWord",
    "ParameterPoint",
    "pc_image",
    "PCLabError",
    "PeriodicOrbit",
    "Phantom",
    "PiecewiseContraction",
    "Quadratic",
    "QuasiPartition",
    "QuasiPartitionError",
    "RATIONAL",
    "Side",
    "symbolic_itinerary_from_tau",
    "tau_cycles",
    "Undetermined",
    "validate_system",
    "ValidationError",
    "verify_quasi_partition",
]
