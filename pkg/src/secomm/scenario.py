"""Scenario, allocation, and report containers shared by the solver and the
experiment harness."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import LinkParams
from .errors import DomainError
from .semcost import SemanticCostParams

# Relative slack tolerated on the budget sums by feasibility checks; the
# bisection solvers meet the budgets far inside it.
BUDGET_SLACK = 1e-9


@dataclass(frozen=True)
class UserProfile:
    """Everything constant about one user: link and cost-model parameters."""

    link: LinkParams
    cost: SemanticCostParams


@dataclass(frozen=True)
class Scenario:
    """A solvable instance: users plus shared budgets and objective weights."""

    users: tuple[UserProfile, ...]
    p_total: float
    b_total: float
    w1: float
    w2: float

    def __post_init__(self):
        object.__setattr__(self, "users", tuple(self.users))
        if len(self.users) < 1:
            raise DomainError("scenario needs at least one user")
        if self.p_total <= 0 or self.b_total <= 0:
            raise DomainError("budgets must be strictly positive")
        if self.w1 < 0 or self.w2 < 0 or self.w1 + self.w2 <= 0:
            raise DomainError("weights must be non-negative with a positive sum")
        if sum(u.cost.p_min for u in self.users) > self.p_total * (1 + BUDGET_SLACK):
            raise DomainError("sum of per-user minimum powers exceeds the power budget")

    @property
    def n_users(self) -> int:
        return len(self.users)

    def p_min(self) -> np.ndarray:
        return np.array([u.cost.p_min for u in self.users])

    def s_max(self) -> np.ndarray:
        return np.array([u.cost.s_max for u in self.users])


@dataclass
class Allocation:
    """Decision vector: per-user power (W), bandwidth (Hz), semantic size (bits)."""

    p: np.ndarray
    b: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        self.s = np.asarray(self.s, dtype=float)
        if not (self.p.shape == self.b.shape == self.s.shape) or self.p.ndim != 1:
            raise DomainError("p, b, s must be 1-D arrays of equal length")

    def copy(self) -> "Allocation":
        return Allocation(self.p.copy(), self.b.copy(), self.s.copy())

    def concatenated(self) -> np.ndarray:
        return np.concatenate([self.p, self.b, self.s])


@dataclass
class MetricsReport:
    """Exact-rate evaluation of an allocation."""

    t1: np.ndarray
    t2: np.ndarray
    t3: np.ndarray
    secrecy_rate: np.ndarray
    utility: np.ndarray
    total_latency: float
    total_utility: float
    objective: float


@dataclass
class TraceRecord:
    """One inner step of the solver: outer iteration k, inner step j."""

    k: int
    j: int
    surrogate_objective: float
    exact_objective: float
    max_kkt_residual: float
    p: np.ndarray
    b: np.ndarray
    s: np.ndarray
    z_warm_started: bool
    starved_users: tuple[int, ...] = field(default_factory=tuple)
