"""Secure semantic-communication resource allocation.

Jointly optimizes per-user transmit power, FDMA bandwidth, and semantic
information size for a downlink system whose transmission rate is a
physical-layer secrecy rate, trading total latency against recovered-
information utility.
"""

from .channel import LinkParams, ScaAnchor
from .errors import (
    ConditionError,
    ConfigError,
    DomainError,
    FeasibilityError,
    GridGuardError,
    RateError,
)
from .estimator import SecureResourceAllocator
from .scenario import Allocation, MetricsReport, Scenario, TraceRecord, UserProfile
from .semcost import SemanticCostParams
from .solver import (
    KktMultipliers,
    KktResult,
    SolveResult,
    SolverConfig,
    check_feasible,
    kkt_solve,
    resource_allocation,
)

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "ConditionError",
    "ConfigError",
    "DomainError",
    "FeasibilityError",
    "GridGuardError",
    "KktMultipliers",
    "KktResult",
    "LinkParams",
    "MetricsReport",
    "RateError",
    "ScaAnchor",
    "Scenario",
    "SecureResourceAllocator",
    "SemanticCostParams",
    "SolveResult",
    "SolverConfig",
    "TraceRecord",
    "UserProfile",
    "check_feasible",
    "kkt_solve",
    "resource_allocation",
    "__version__",
]
