"""Fitted cost models of the semantic pipeline: extraction cycles on the
server, recovery cycles on the user device, recovered-information utility,
and the per-user latency/utility bookkeeping built from them.

Sizes are in bits, compute capacities in cycles/s, times in seconds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from . import channel
from .errors import DomainError, RateError

if TYPE_CHECKING:  # pragma: no cover
    from .scenario import Allocation, Scenario

# Semantic sizes are searched down to a single bit; below that the recovery
# cost s**(-c4) blows up.
S_FLOOR = 1.0


@dataclass(frozen=True)
class SemanticCostParams:
    """Per-user cost constants, obtained by function fitting in practice.

    d_data     original data size (bits)
    c1, c2     extraction-cost scale (cycles) and even exponent >= 2
    c3, c4     recovery-cost scale and positive exponent
    c5         utility saturation rate (1/bits)
    y2_coeff   graph-construction cost per original bit (cycles/bit)
    f_server   server compute allocated to this user (cycles/s)
    g_user     user device compute (cycles/s)
    s_max      largest admissible semantic size (bits)
    p_min      smallest admissible transmit power (W)
    """

    d_data: float
    c1: float
    c2: int
    c3: float
    c4: float
    c5: float
    y2_coeff: float
    f_server: float
    g_user: float
    s_max: float
    p_min: float

    def __post_init__(self):
        if self.d_data <= 0 or self.c1 <= 0 or self.c3 <= 0 or self.c4 <= 0:
            raise DomainError("d_data, c1, c3, c4 must be strictly positive")
        if self.c2 < 2 or self.c2 % 2 != 0:
            raise DomainError("c2 must be a positive even integer >= 2")
        if self.c5 < 0:
            raise DomainError("c5 must be non-negative")
        if self.f_server <= 0 or self.g_user <= 0:
            raise DomainError("compute capacities must be strictly positive")
        if self.s_max <= 0:
            raise DomainError("s_max must be strictly positive")


def server_cycles(s, params: SemanticCostParams):
    """Extraction cost y2_coeff*d_data + c1*(s/d_data - 1)**c2 in cycles.

    Minimal (just the graph construction) at s = d_data, growing as the
    extraction compresses harder.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0) or np.any(s > params.d_data):
        raise DomainError("semantic size must lie in (0, d_data]")
    out = params.y2_coeff * params.d_data + params.c1 * (s / params.d_data - 1.0) ** params.c2
    return float(out) if out.ndim == 0 else out


def user_cycles(s, params: SemanticCostParams):
    """Recovery cost c3 * s**(-c4) in cycles; convex and decreasing in s."""
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise DomainError("semantic size must be positive")
    out = params.c3 * s ** (-params.c4)
    return float(out) if out.ndim == 0 else out


def utility(s, params: SemanticCostParams):
    """Recovered-information utility 1 - exp(-c5*s), saturating in [0, 1)."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise DomainError("semantic size must be non-negative")
    out = -np.expm1(-params.c5 * s)
    return float(out) if out.ndim == 0 else out


def latency_components(
    s,
    p,
    B,
    link: channel.LinkParams,
    params: SemanticCostParams,
    anchor: channel.ScaAnchor | None = None,
    user: int | None = None,
):
    """(T1, T2, T3): server compute, transmission, user compute times.

    T2 divides the semantic size by the exact secrecy rate when ``anchor``
    is None (reporting) or by the concave surrogate at that anchor
    (optimization).  A non-positive transmission rate is an error.
    """
    if anchor is None:
        r = channel.secrecy_rate(p, B, link, user=user)
    else:
        r = channel.surrogate_rate(p, B, link, anchor)
    if np.any(np.asarray(r) <= 0):
        who = "" if user is None else f" for user {user}"
        raise RateError(f"non-positive transmission rate{who}; cannot form the latency")
    t1 = server_cycles(s, params) / params.f_server
    t2 = np.asarray(s, dtype=float) / r
    t2 = float(t2) if t2.ndim == 0 else t2
    t3 = user_cycles(s, params) / params.g_user
    return t1, t2, t3


def static_cost(s, params: SemanticCostParams, w1: float, w2: float):
    """Per-user cost independent of the transmission: w1*(T1+T3) - w2*utility.

    Convex in s; its slope runs from -inf at s -> 0+ to +inf as s grows, so
    the stationarity equation of the size solver always has a unique root.
    """
    t1 = server_cycles(s, params) / params.f_server
    t3 = user_cycles(s, params) / params.g_user
    return w1 * (t1 + t3) - w2 * utility(s, params)


def static_cost_slope(s, params: SemanticCostParams, w1: float, w2: float):
    """Analytic derivative of :func:`static_cost` in s."""
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise DomainError("semantic size must be positive")
    d_t1 = params.c1 * params.c2 * (s / params.d_data - 1.0) ** (params.c2 - 1) / (
        params.d_data * params.f_server
    )
    d_t3 = -params.c3 * params.c4 * s ** (-params.c4 - 1.0) / params.g_user
    d_u = params.c5 * np.exp(-params.c5 * s)
    out = w1 * (d_t1 + d_t3) - w2 * d_u
    return float(out) if out.ndim == 0 else out


def objective(alloc: "Allocation", scenario: "Scenario", anchors=None) -> float:
    """Weighted sum over users of w1*(T1+T2+T3) - w2*utility.

    With ``anchors`` None this is the exact objective (true secrecy rates);
    with a list of per-user anchors it is the surrogate objective the inner
    solver minimizes.  The allocation must be feasible; budget or box
    violations are reported by the solver's feasibility check.
    """
    from .solver import check_feasible  # local import to avoid a cycle

    report = check_feasible(alloc, scenario)
    if not report.ok:
        from .errors import FeasibilityError

        raise FeasibilityError("infeasible allocation:\n" + report.describe())
    total = 0.0
    for n, profile in enumerate(scenario.users):
        a = anchors[n] if anchors is not None else None
        t1, t2, t3 = latency_components(
            alloc.s[n], alloc.p[n], alloc.b[n], profile.link, profile.cost, anchor=a, user=n
        )
        total += scenario.w1 * (t1 + t2 + t3) - scenario.w2 * utility(alloc.s[n], profile.cost)
    return total
