"""Three-layer optimizer for the joint (power, bandwidth, semantic size)
allocation problem.

Layers, innermost first:

* a KKT solver for the convex inner problem: per-user stationarity roots in
  closed form up to one-dimensional bisections, glued together by nested
  water-filling bisections on the shared power multiplier (gamma) and
  bandwidth multiplier (xi) -- gamma is re-solved inside every xi trial;
* a fractional-programming loop alternating the closed-form auxiliary
  update z = 1/(2*R*s) with the KKT solver;
* an outer loop that re-linearizes the eavesdropping rate at the current
  bandwidths (fresh anchors) each iteration until the decision vector stops
  moving.

Root finding is bracket-based throughout: plain bisection on the scalar
stationarity residuals, a bracket-safeguarded Newton step inside the scalar
SNR inversion, and Illinois false-position on the two budget sums -- each
proposal stays inside a sign-valid bracket, so convergence is unconditional.
Hot loops are numba-compiled; everything is deterministic, and per-user
results are always combined by user index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from . import channel, semcost
from .channel import B_FLOOR, LN2, LinkParams, ScaAnchor
from .errors import DomainError, FeasibilityError, RateError
from .scenario import BUDGET_SLACK, Allocation, MetricsReport, Scenario, TraceRecord
from .semcost import S_FLOOR


@dataclass
class SolverConfig:
    """Tolerances and iteration caps for all three layers."""

    eps0: float = 1e-4          # outer convergence tolerance on the decision vector
    k_max: int = 20             # outer-iteration cap
    j_max: int = 30             # fractional-programming cap
    i_max: int = 20             # anchor-refresh cap (anchors refresh once per outer pass)
    bisect_tol: float = 1e-10   # relative bracket / residual tolerance
    bisect_max_iter: int = 200

    def __post_init__(self):
        if min(self.eps0, self.bisect_tol) <= 0 or min(self.k_max, self.j_max, self.i_max, self.bisect_max_iter) <= 0:
            raise DomainError("solver tolerances and iteration caps must be positive")


@dataclass
class KktMultipliers:
    """Dual variables of the inner problem; all non-negative."""

    alpha: np.ndarray  # per-user, semantic-size cap
    beta: np.ndarray   # per-user, minimum-power bound
    gamma: float       # shared, total-power budget
    xi: float          # shared, total-bandwidth budget


@dataclass
class KktResidualReport:
    """Scaled optimality diagnostics at a returned allocation."""

    stationarity_p: np.ndarray
    stationarity_b: np.ndarray
    stationarity_s: np.ndarray
    comp_slack: np.ndarray       # scaled products for (s cap, p floor, power sum, bandwidth sum)
    primal_violation: float
    dual_min: float

    @property
    def max_residual(self) -> float:
        return max(
            float(np.max(self.stationarity_p)),
            float(np.max(self.stationarity_b)),
            float(np.max(self.stationarity_s)),
            float(np.max(self.comp_slack)),
            self.primal_violation,
            max(0.0, -self.dual_min),
        )


@dataclass
class KktResult:
    allocation: Allocation
    multipliers: KktMultipliers
    residuals: KktResidualReport
    starved: tuple[int, ...]


@dataclass
class Violation:
    constraint: str
    user: int | None
    slack: float
    message: str


@dataclass
class FeasibilityReport:
    ok: bool
    violations: list[Violation] = field(default_factory=list)

    def describe(self) -> str:
        return "\n".join(v.message for v in self.violations) if self.violations else "feasible"


@dataclass
class FpResult:
    allocation: Allocation
    z: np.ndarray
    n_iterations: int


@dataclass
class SolveResult:
    allocation: Allocation
    metrics: MetricsReport
    trace: list[TraceRecord]
    converged: bool
    n_outer: int
    n_fp_total: int


# Unit floors used when normalizing the outer convergence test: 1 mW, 1 kHz,
# 1 kbit.  Mixed physical units need per-variable scaling.
UNIT_FLOOR_P = 1e-3
UNIT_FLOOR_B = 1e3
UNIT_FLOOR_S = 1e3

# Columns of the per-user constant table handed to the numba kernels.
_SNRC, _KAPPA, _E0, _C0, _XC, _PMIN, _SMAX, _DDATA, _C1, _C2, _C3, _C4, _C5, _Y2, _FSRV, _GUSR, _CE = range(17)

_STATUS_OK = 0
_STATUS_STARVED = 1
_STATUS_NO_RATE = 2


# --------------------------------------------------------------------------
# numba kernels
# --------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _phi(x):
    # d/dB of B*log2(1 + c/B) expressed through x = c/B; series below 1e-5
    # avoids the log1p(x) - x/(1+x) cancellation.
    if x < 1e-5:
        return (0.5 * x * x - (2.0 / 3.0) * x * x * x) / LN2
    return (np.log1p(x) - x / (1.0 + x)) / LN2


@njit(cache=True, nogil=True)
def _phi_inv(e0):
    # smallest non-negative x with _phi(x) == e0; _phi is strictly increasing
    if e0 <= 0.0:
        return 0.0
    lo = 0.0
    hi = 1.0
    it = 0
    while _phi(hi) < e0:
        hi *= 2.0
        it += 1
        if it > 600:
            return hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _phi(mid) < e0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * hi:
            break
    return 0.5 * (lo + hi)


@njit(cache=True, nogil=True)
def _R_val(p, B, snrc, e0, c0):
    # surrogate secrecy rate: B*(log2(1+x) - e0) + c0 with x = snrc*p/B
    return B * (np.log1p(snrc * p / B) / LN2 - e0) + c0


@njit(cache=True, nogil=True)
def _phi_B_at(p, B, w1, z, snrc, e0, c0):
    # marginal objective value of bandwidth; +inf where the rate is not yet positive
    R = _R_val(p, B, snrc, e0, c0)
    if R <= 0.0:
        return np.inf
    return w1 * (_phi(snrc * p / B) - e0) / (4.0 * R * R * R * z)


@njit(cache=True, nogil=True)
def _phi_p_at(p, B, w1, z, kappa, snrc, e0, c0):
    # marginal objective value of power; +inf where the rate is not yet positive
    R = _R_val(p, B, snrc, e0, c0)
    if R <= 0.0:
        return np.inf
    Rp = kappa / (1.0 + snrc * p / B)
    return w1 * Rp / (4.0 * R * R * R * z)


@njit(cache=True, nogil=True)
def _solve_B(p, xi, z, w1, snrc, e0, c0, xc, b_floor, b_cap, tol, maxit):
    """Bisection for the bandwidth stationarity root at fixed power.

    Returns (B, status).  The marginal value of bandwidth is strictly
    decreasing on the region where the surrogate rate is positive and its
    slope is positive, i.e. on (rate-zero crossing, c/xc); outside it the
    residual sign is forced so bisection stays valid.
    """
    c = snrc * p
    b_peak = c / xc if xc > 0.0 else np.inf
    hi = b_cap if b_cap < b_peak else b_peak
    if hi <= b_floor:
        return b_floor, _STATUS_STARVED
    if _R_val(p, hi, snrc, e0, c0) <= 0.0:
        # rate peaks at hi on this bracket, so it is non-positive everywhere
        return b_floor, _STATUS_NO_RATE
    g_hi = _phi_B_at(p, hi, w1, z, snrc, e0, c0)
    if g_hi >= xi:
        return hi, _STATUS_OK
    lo = b_floor
    if _R_val(p, lo, snrc, e0, c0) > 0.0 and _phi_B_at(p, lo, w1, z, snrc, e0, c0) <= xi:
        return lo, _STATUS_OK
    for _ in range(maxit):
        mid = 0.5 * (lo + hi)
        if _phi_B_at(p, mid, w1, z, snrc, e0, c0) > xi:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * hi:
            break
    return 0.5 * (lo + hi), _STATUS_OK


@njit(cache=True, nogil=True)
def _Bhat_xi_zero(p, snrc, xc, b_floor, b_cap):
    # with a free bandwidth budget the root sits where the rate slope vanishes
    if xc <= 0.0:
        return b_cap
    bp = snrc * p / xc
    if bp > b_cap:
        bp = b_cap
    if bp < b_floor:
        bp = b_floor
    return bp


@njit(cache=True, nogil=True)
def _solve_p_fixed_B(B, gamma, z, w1, kappa, snrc, e0, c0, p_lo, p_cap, tol, maxit):
    # bisection on the power marginal at a fixed bandwidth (clamped-B branch)
    if _phi_p_at(p_cap, B, w1, z, kappa, snrc, e0, c0) >= gamma:
        return p_cap
    if _phi_p_at(p_lo, B, w1, z, kappa, snrc, e0, c0) <= gamma:
        return p_lo
    lo = p_lo
    hi = p_cap
    for _ in range(maxit):
        mid = 0.5 * (lo + hi)
        if _phi_p_at(mid, B, w1, z, kappa, snrc, e0, c0) > gamma:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * hi:
            break
    return 0.5 * (lo + hi)


@njit(cache=True, nogil=True)
def _solve_p_xi_zero(gamma, z, w1, kappa, snrc, e0, c0, xc, p_lo, p_cap, b_floor, b_cap, tol, maxit):
    # power root along the xi = 0 bandwidth response
    B = _Bhat_xi_zero(p_cap, snrc, xc, b_floor, b_cap)
    if _phi_p_at(p_cap, B, w1, z, kappa, snrc, e0, c0) >= gamma:
        return p_cap
    B = _Bhat_xi_zero(p_lo, snrc, xc, b_floor, b_cap)
    if _phi_p_at(p_lo, B, w1, z, kappa, snrc, e0, c0) <= gamma:
        return p_lo
    lo = p_lo
    hi = p_cap
    for _ in range(maxit):
        mid = 0.5 * (lo + hi)
        B = _Bhat_xi_zero(mid, snrc, xc, b_floor, b_cap)
        if _phi_p_at(mid, B, w1, z, kappa, snrc, e0, c0) > gamma:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * hi:
            break
    return 0.5 * (lo + hi)


@njit(cache=True, nogil=True)
def _psi(x, e0, kappa):
    # ratio of bandwidth to power marginals as a function of the SNR x;
    # strictly increasing from 0 on x > phi_inv(e0)
    return (_phi(x) - e0) * (1.0 + x) / kappa


@njit(cache=True, nogil=True)
def _solve_x(t, e0, kappa, xc, tol, maxit):
    """Invert _psi at t on (xc, inf).

    Bisection bracket with a safeguarded Newton step (the derivative
    (log2(1+x) - e0)/kappa is one log away); Newton proposals outside the
    bracket fall back to the midpoint, so convergence is unconditional.
    Returns -1.0 if t is not reachable below the overflow cap.
    """
    lo = xc
    hi = 2.0 * xc + 1.0
    it = 0
    while _psi(hi, e0, kappa) < t:
        hi *= 4.0
        it += 1
        if hi > 1e300 or it > 600:
            return -1.0
    x = 0.5 * (lo + hi)
    for _ in range(maxit):
        f = _psi(x, e0, kappa) - t
        if abs(f) <= 1e-14 * t:
            return x
        if f > 0.0:
            hi = x
        else:
            lo = x
        if hi - lo <= tol * hi:
            break
        d = (np.log1p(x) / LN2 - e0) / kappa
        x_new = x - f / d if d > 0.0 else lo
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        x = x_new
    return 0.5 * (lo + hi)


@njit(cache=True, nogil=True)
def _user_pb_nested(xi, gamma, z, w1, kappa, snrc, e0, c0, xc, p_min, p_cap, b_floor, b_cap, tol, maxit):
    # literal nested bisection: power residual evaluated on the bandwidth response
    B_hi, st_hi = _solve_B(p_cap, xi, z, w1, snrc, e0, c0, xc, b_floor, b_cap, tol, maxit)
    if st_hi == _STATUS_NO_RATE:
        return p_min, b_floor, True
    if _phi_p_at(p_cap, B_hi, w1, z, kappa, snrc, e0, c0) >= gamma:
        return p_cap, B_hi, st_hi == _STATUS_STARVED
    B_lo, st_lo = _solve_B(p_min, xi, z, w1, snrc, e0, c0, xc, b_floor, b_cap, tol, maxit)
    f_lo = np.inf if st_lo == _STATUS_NO_RATE else _phi_p_at(p_min, B_lo, w1, z, kappa, snrc, e0, c0)
    if f_lo <= gamma:
        return p_min, B_lo, st_lo == _STATUS_STARVED
    lo = p_min
    hi = p_cap
    for _ in range(maxit):
        mid = 0.5 * (lo + hi)
        B_m, st_m = _solve_B(mid, xi, z, w1, snrc, e0, c0, xc, b_floor, b_cap, tol, maxit)
        f_m = np.inf if st_m == _STATUS_NO_RATE else _phi_p_at(mid, B_m, w1, z, kappa, snrc, e0, c0)
        if f_m > gamma:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * hi:
            break
    p = 0.5 * (lo + hi)
    B, st = _solve_B(p, xi, z, w1, snrc, e0, c0, xc, b_floor, b_cap, tol, maxit)
    return p, B, st == _STATUS_STARVED


@njit(cache=True, nogil=True)
def _user_pb(xi, gamma, z, w1, kappa, snrc, e0, c0, xc, p_min, p_cap, b_floor, b_cap, tol, maxit):
    """Per-user (power, bandwidth) response for given multipliers.

    Returns (p, B, starved).  The power returned is already floored at
    p_min (the search floor equals the per-user bound, so the downstream
    max-clamp is the identity).
    """
    if gamma <= 0.0:
        # no power price: the power marginal stays positive, clamp at the cap
        p_t = p_cap if p_cap > p_min else p_min
        if xi <= 0.0:
            return p_t, _Bhat_xi_zero(p_t, snrc, xc, b_floor, b_cap), False
        B_t, st = _solve_B(p_t, xi, z, w1, snrc, e0, c0, xc, b_floor, b_cap, tol, maxit)
        return p_t, B_t, st != _STATUS_OK
    if xi <= 0.0:
        p_h = _solve_p_xi_zero(gamma, z, w1, kappa, snrc, e0, c0, xc, p_min, p_cap, b_floor, b_cap, tol, maxit)
        B_t = _Bhat_xi_zero(p_h, snrc, xc, b_floor, b_cap)
        return p_h, B_t, B_t <= b_floor
    # generic case: solve the two stationarity equations jointly through the
    # SNR substitution, then fall back to clamped branches when the joint
    # root leaves the box
    t = xi / gamma
    x = _solve_x(t, e0, kappa, xc, tol, maxit)
    if x > 0.0:
        RB = _phi(x) - e0
        if RB > 0.0:
            R = (w1 * RB / (4.0 * z * xi)) ** (1.0 / 3.0)
            denom = np.log1p(x) / LN2 - e0
            B = (R - c0) / denom
            p = x * B / snrc
            if b_floor <= B <= b_cap and p_min <= p <= p_cap:
                return p, B, False
            if p < p_min:
                B_t, st = _solve_B(p_min, xi, z, w1, snrc, e0, c0, xc, b_floor, b_cap, tol, maxit)
                if st != _STATUS_NO_RATE:
                    return p_min, B_t, st == _STATUS_STARVED
            elif p > p_cap:
                B_t, st = _solve_B(p_cap, xi, z, w1, snrc, e0, c0, xc, b_floor, b_cap, tol, maxit)
                if st != _STATUS_NO_RATE:
                    return p_cap, B_t, st == _STATUS_STARVED
            elif B > b_cap:
                p_h = _solve_p_fixed_B(b_cap, gamma, z, w1, kappa, snrc, e0, c0, p_min, p_cap, tol, maxit)
                # accept only if the bandwidth response at p_h indeed clamps high
                if _phi_B_at(p_h, b_cap, w1, z, snrc, e0, c0) >= xi * (1.0 - 1e-9):
                    return p_h, b_cap, False
    return _user_pb_nested(xi, gamma, z, w1, kappa, snrc, e0, c0, xc, p_min, p_cap, b_floor, b_cap, tol, maxit)


@njit(cache=True, nogil=True)
def _sum_p_probe(xi, gamma, U, z, w1, p_cap, b_floor, b_cap, tol, maxit, out_p, out_B, out_sv):
    total = 0.0
    for n in range(U.shape[0]):
        p, B, sv = _user_pb(
            xi, gamma, z[n], w1, U[n, _KAPPA], U[n, _SNRC], U[n, _E0], U[n, _C0],
            U[n, _XC], U[n, _PMIN], p_cap, b_floor, b_cap, tol, maxit,
        )
        out_p[n] = p
        out_B[n] = B
        out_sv[n] = sv
        total += p
    return total


@njit(cache=True, nogil=True)
def _solve_gamma_kernel(xi, U, z, w1, p_total, p_cap, b_floor, b_cap, tol_in, tol_budget, maxit,
                        gamma_warm, out_p, out_B, out_sv):
    """Water-filling bisection on the power price; the per-user power sum is
    non-increasing in gamma.

    Every exit path leaves out_p/out_B/out_sv filled by a probe at exactly
    the returned gamma, so complementary slackness holds for the caller.
    """
    total = _sum_p_probe(xi, 0.0, U, z, w1, p_cap, b_floor, b_cap, tol_in, maxit, out_p, out_B, out_sv)
    if total <= p_total * (1.0 + 1e-12):
        return 0.0
    if gamma_warm > 0.0:
        g_hi = gamma_warm
    else:
        # price at which every user clamps to its floor: sum = sum(p_min) <= p_total
        g_hi = 0.0
        for n in range(U.shape[0]):
            B_n, st = _solve_B(U[n, _PMIN], xi, z[n], w1, U[n, _SNRC], U[n, _E0], U[n, _C0],
                               U[n, _XC], b_floor, b_cap, tol_in, maxit)
            if st == _STATUS_OK:
                f_n = _phi_p_at(U[n, _PMIN], B_n, w1, z[n], U[n, _KAPPA], U[n, _SNRC], U[n, _E0], U[n, _C0])
                if np.isfinite(f_n) and f_n > g_hi:
                    g_hi = f_n
        if g_hi <= 0.0:
            g_hi = 1.0
        g_hi *= 1.0 + 1e-6
    lo = 0.0
    f_lo = total - p_total  # positive: the zero-price demand overshoots
    it = 0
    f_hi = _sum_p_probe(xi, g_hi, U, z, w1, p_cap, b_floor, b_cap, tol_in, maxit, out_p, out_B, out_sv) - p_total
    while f_hi > 0.0:
        lo = g_hi
        f_lo = f_hi
        g_hi *= 2.0
        f_hi = _sum_p_probe(xi, g_hi, U, z, w1, p_cap, b_floor, b_cap, tol_in, maxit, out_p, out_B, out_sv) - p_total
        it += 1
        if it > 200:
            break
    hi = g_hi
    if abs(f_hi) <= tol_budget * p_total:
        return hi
    # false-position with the Illinois safeguard and a periodic midpoint step:
    # superlinear on the smooth water-filling curve, never leaves the bracket
    side = 0
    for k in range(maxit):
        if k % 4 == 3:
            mid = 0.5 * (lo + hi)
        else:
            mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
            if not (lo < mid < hi):
                mid = 0.5 * (lo + hi)
        f_m = _sum_p_probe(xi, mid, U, z, w1, p_cap, b_floor, b_cap, tol_in, maxit, out_p, out_B, out_sv) - p_total
        if abs(f_m) <= tol_budget * p_total and f_m <= 0.0:
            return mid
        if f_m > 0.0:
            lo = mid
            f_lo = f_m
            if side == 1:
                f_hi *= 0.5
            side = 1
        else:
            hi = mid
            f_hi = f_m
            if side == -1:
                f_lo *= 0.5
            side = -1
        if hi - lo <= 1e-16 * hi:
            break
    # bracket exhausted without meeting the residual: land on the feasible side
    _sum_p_probe(xi, hi, U, z, w1, p_cap, b_floor, b_cap, tol_in, maxit, out_p, out_B, out_sv)
    return hi


@njit(cache=True, nogil=True)
def _solve_xi_kernel(U, z, w1, p_total, b_total, p_cap, b_floor, tol_in, tol_budget, maxit,
                     xi_warm, gamma_warm, out_p, out_B, out_sv):
    """Outer water-filling bisection on the bandwidth price, re-solving the
    power price inside every trial; the bandwidth sum is non-increasing in xi.

    As with the power price, the output arrays always correspond to a probe
    at exactly the returned (xi, gamma) pair.
    """
    gamma = _solve_gamma_kernel(0.0, U, z, w1, p_total, p_cap, b_floor, b_total, tol_in, tol_budget,
                                maxit, gamma_warm, out_p, out_B, out_sv)
    f_lo = out_B.sum() - b_total
    if f_lo <= b_total * 1e-12:
        return 0.0, gamma
    x_hi = xi_warm if xi_warm > 0.0 else 1.0
    lo = 0.0
    it = 0
    while True:
        gamma = _solve_gamma_kernel(x_hi, U, z, w1, p_total, p_cap, b_floor, b_total, tol_in, tol_budget,
                                    maxit, gamma, out_p, out_B, out_sv)
        f_hi = out_B.sum() - b_total
        if f_hi <= 0.0:
            break
        lo = x_hi
        f_lo = f_hi
        x_hi *= 2.0
        it += 1
        if it > 200:
            break
    hi = x_hi
    if abs(f_hi) <= tol_budget * b_total:
        return hi, gamma
    # same safeguarded false-position as the power price
    side = 0
    for k in range(maxit):
        if k % 4 == 3:
            mid = 0.5 * (lo + hi)
        else:
            mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
            if not (lo < mid < hi):
                mid = 0.5 * (lo + hi)
        gamma = _solve_gamma_kernel(mid, U, z, w1, p_total, p_cap, b_floor, b_total, tol_in, tol_budget,
                                    maxit, gamma, out_p, out_B, out_sv)
        f_m = out_B.sum() - b_total
        if abs(f_m) <= tol_budget * b_total and f_m <= 0.0:
            return mid, gamma
        if f_m > 0.0:
            lo = mid
            f_lo = f_m
            if side == 1:
                f_hi *= 0.5
            side = 1
        else:
            hi = mid
            f_hi = f_m
            if side == -1:
                f_lo *= 0.5
            side = -1
        if hi - lo <= 1e-16 * hi:
            break
    gamma = _solve_gamma_kernel(hi, U, z, w1, p_total, p_cap, b_floor, b_total, tol_in, tol_budget,
                                maxit, gamma, out_p, out_B, out_sv)
    return hi, gamma


@njit(cache=True, nogil=True)
def _wprime(s, w1, w2, d, c1, c2, c3, c4, c5, fsrv, gusr):
    # derivative of the transmission-independent per-user cost in s
    dt1 = c1 * c2 * (s / d - 1.0) ** (c2 - 1.0) / (d * fsrv)
    dt3 = -c3 * c4 * s ** (-c4 - 1.0) / gusr
    return w1 * (dt1 + dt3) - w2 * c5 * np.exp(-c5 * s)


@njit(cache=True, nogil=True)
def _solve_s_kernel(U, z, w1, w2, s_floor, tol, maxit, out_s):
    # per-user bisection on the strictly increasing W'(s) + 2*w1*z*s
    for n in range(U.shape[0]):
        d = U[n, _DDATA]
        c1 = U[n, _C1]
        c2 = U[n, _C2]
        c3 = U[n, _C3]
        c4 = U[n, _C4]
        c5 = U[n, _C5]
        fsrv = U[n, _FSRV]
        gusr = U[n, _GUSR]
        s_max = U[n, _SMAX]
        g_hi = _wprime(s_max, w1, w2, d, c1, c2, c3, c4, c5, fsrv, gusr) + 2.0 * w1 * z[n] * s_max
        if g_hi <= 0.0:
            out_s[n] = s_max
            continue
        g_lo = _wprime(s_floor, w1, w2, d, c1, c2, c3, c4, c5, fsrv, gusr) + 2.0 * w1 * z[n] * s_floor
        if g_lo >= 0.0:
            out_s[n] = s_floor
            continue
        lo = s_floor
        hi = s_max
        for _ in range(maxit):
            mid = 0.5 * (lo + hi)
            g_m = _wprime(mid, w1, w2, d, c1, c2, c3, c4, c5, fsrv, gusr) + 2.0 * w1 * z[n] * mid
            if g_m < 0.0:
                lo = mid
            else:
                hi = mid
            if hi - lo <= tol * hi:
                break
        out_s[n] = 0.5 * (lo + hi)


# --------------------------------------------------------------------------
# python layer
# --------------------------------------------------------------------------


def _user_table(scenario: Scenario, anchors: list[ScaAnchor]) -> np.ndarray:
    """Pack per-user constants (including the anchor-dependent linearization
    terms) into the flat table consumed by the kernels."""
    n = scenario.n_users
    U = np.empty((n, 17), dtype=float)
    for i, prof in enumerate(scenario.users):
        link = prof.link
        cost = prof.cost
        b0 = anchors[i].b_anchor
        e0 = channel.d_eavesdrop_dB(b0, link)
        c0 = e0 * b0 - channel.eavesdrop_rate(b0, link)
        U[i, _SNRC] = link.snr_coeff
        U[i, _KAPPA] = link.snr_coeff / LN2
        U[i, _E0] = e0
        U[i, _C0] = c0
        U[i, _XC] = _phi_inv(e0)
        U[i, _PMIN] = cost.p_min
        U[i, _SMAX] = cost.s_max
        U[i, _DDATA] = cost.d_data
        U[i, _C1] = cost.c1
        U[i, _C2] = float(cost.c2)
        U[i, _C3] = cost.c3
        U[i, _C4] = cost.c4
        U[i, _C5] = cost.c5
        U[i, _Y2] = cost.y2_coeff
        U[i, _FSRV] = cost.f_server
        U[i, _GUSR] = cost.g_user
        U[i, _CE] = link.eve_snr_product
    return U


def _inner_tol(config: SolverConfig) -> float:
    # scalar bisections run a few halvings deeper than the budget residual
    # tolerance so auxiliary-update noise sits well below the FP stop test
    return config.bisect_tol * 2.0 ** -8


# Vectorized per-user quantities over the packed table; these carry the hot
# per-iteration bookkeeping (auxiliary updates, trace objectives) without
# touching the per-user python objects.

def _surrogate_rates_arr(U: np.ndarray, p: np.ndarray, b: np.ndarray) -> np.ndarray:
    return b * (np.log1p(U[:, _SNRC] * p / b) / LN2 - U[:, _E0]) + U[:, _C0]


def _exact_rates_arr(U: np.ndarray, p: np.ndarray, b: np.ndarray) -> np.ndarray:
    return b * (np.log1p(U[:, _SNRC] * p / b) - np.log1p(U[:, _CE] / b)) / LN2


def _objective_arr(U: np.ndarray, p: np.ndarray, b: np.ndarray, s: np.ndarray,
                   w1: float, w2: float, exact: bool) -> float:
    r = _exact_rates_arr(U, p, b) if exact else _surrogate_rates_arr(U, p, b)
    t1 = (U[:, _Y2] * U[:, _DDATA] + U[:, _C1] * (s / U[:, _DDATA] - 1.0) ** U[:, _C2]) / U[:, _FSRV]
    t3 = U[:, _C3] * s ** (-U[:, _C4]) / U[:, _GUSR]
    util = -np.expm1(-U[:, _C5] * s)
    return float(np.sum(w1 * (t1 + s / r + t3) - w2 * util))


def _wprime_arr(U: np.ndarray, s: np.ndarray, w1: float, w2: float) -> np.ndarray:
    dt1 = U[:, _C1] * U[:, _C2] * (s / U[:, _DDATA] - 1.0) ** (U[:, _C2] - 1.0) / (U[:, _DDATA] * U[:, _FSRV])
    dt3 = -U[:, _C3] * U[:, _C4] * s ** (-U[:, _C4] - 1.0) / U[:, _GUSR]
    return w1 * (dt1 + dt3) - w2 * U[:, _C5] * np.exp(-U[:, _C5] * s)


def check_feasible(alloc: Allocation, scenario: Scenario) -> FeasibilityReport:
    """Verify the per-user boxes, both budget sums, and the minimum-power
    condition; every violated constraint is reported with its slack."""
    v: list[Violation] = []
    n = scenario.n_users
    if len(alloc.p) != n:
        return FeasibilityReport(False, [Violation("shape", None, 0.0, "allocation size mismatch")])
    for i, prof in enumerate(scenario.users):
        if alloc.p[i] < prof.cost.p_min:
            slack = prof.cost.p_min - alloc.p[i]
            v.append(Violation("p_min", i, slack, f"user {i}: p={alloc.p[i]:.6g} W below p_min={prof.cost.p_min:.6g} W"))
        if alloc.s[i] <= 0 or alloc.s[i] > prof.cost.s_max:
            slack = max(0.0, alloc.s[i] - prof.cost.s_max) + max(0.0, -alloc.s[i])
            v.append(Violation("s_box", i, slack, f"user {i}: s={alloc.s[i]:.6g} outside (0, {prof.cost.s_max:.6g}]"))
        if alloc.b[i] <= 0:
            v.append(Violation("b_pos", i, -alloc.b[i], f"user {i}: non-positive bandwidth {alloc.b[i]:.6g}"))
        if alloc.p[i] < prof.link.min_power_threshold:
            slack = prof.link.min_power_threshold - alloc.p[i]
            v.append(Violation("secrecy_condition", i, slack,
                               f"user {i}: p={alloc.p[i]:.6g} W below the secrecy threshold "
                               f"{prof.link.min_power_threshold:.6g} W"))
    p_sum = float(np.sum(alloc.p))
    if p_sum > scenario.p_total * (1.0 + BUDGET_SLACK):
        v.append(Violation("p_total", None, p_sum - scenario.p_total,
                           f"power sum {p_sum:.9g} W exceeds budget {scenario.p_total:.9g} W"))
    b_sum = float(np.sum(alloc.b))
    if b_sum > scenario.b_total * (1.0 + BUDGET_SLACK):
        v.append(Violation("b_total", None, b_sum - scenario.b_total,
                           f"bandwidth sum {b_sum:.9g} Hz exceeds budget {scenario.b_total:.9g} Hz"))
    return FeasibilityReport(not v, v)


def quad_transform_value(s: float, r: float, z: float) -> float:
    """Quadratic-transform surrogate of the ratio s/r: s^2*z + 1/(4*r^2*z).

    Equals s/r exactly at the minimizing auxiliary z = 1/(2*r*s) and is
    larger for every other positive z.
    """
    if r <= 0 or z <= 0 or s <= 0:
        raise DomainError("quad transform needs positive size, rate, and auxiliary")
    return s * s * z + 1.0 / (4.0 * r * r * z)


def update_z(alloc: Allocation, anchors: list[ScaAnchor], scenario: Scenario) -> np.ndarray:
    """Closed-form auxiliary update z_n = 1/(2 * R_n * s_n)."""
    z = np.empty(scenario.n_users)
    for n, prof in enumerate(scenario.users):
        r = channel.surrogate_rate(alloc.p[n], alloc.b[n], prof.link, anchors[n])
        if r <= 0 or alloc.s[n] <= 0:
            raise RateError(f"user {n}: non-positive surrogate rate or size in the auxiliary update")
        z[n] = 1.0 / (2.0 * r * alloc.s[n])
    return z


def solve_B_given(p: float, xi: float, z: float, link: LinkParams, anchor: ScaAnchor, *,
                  w1: float, b_total: float, b_floor: float = B_FLOOR,
                  tol: float = 1e-10, max_iter: int = 200) -> float:
    """Bandwidth stationarity root in [b_floor, b_total] at fixed power;
    clamps to an endpoint when the marginal value never crosses xi."""
    e0 = channel.d_eavesdrop_dB(anchor.b_anchor, link)
    c0 = e0 * anchor.b_anchor - channel.eavesdrop_rate(anchor.b_anchor, link)
    B, status = _solve_B(p, xi, z, w1, link.snr_coeff, e0, c0, _phi_inv(e0), b_floor, b_total, tol, max_iter)
    if status == _STATUS_NO_RATE:
        raise RateError("surrogate rate is non-positive over the whole bandwidth range")
    return float(B)


def solve_p_given(xi: float, gamma: float, z: float, link: LinkParams, anchor: ScaAnchor,
                  params: semcost.SemanticCostParams, *, w1: float, p_cap: float,
                  b_total: float, b_floor: float = B_FLOOR,
                  tol: float = 1e-10, max_iter: int = 200) -> float:
    """Power stationarity root, evaluated along the bandwidth response.

    The search floor is the user's own p_min (a root below it is clamped up
    by the caller anyway, so searching lower cannot change the outcome);
    gamma = 0 returns the p_cap sentinel.
    """
    e0 = channel.d_eavesdrop_dB(anchor.b_anchor, link)
    c0 = e0 * anchor.b_anchor - channel.eavesdrop_rate(anchor.b_anchor, link)
    p, _, _ = _user_pb(xi, gamma, z, w1, link.snr_coeff / LN2, link.snr_coeff, e0, c0,
                       _phi_inv(e0), params.p_min, p_cap, b_floor, b_total, tol, max_iter)
    return float(p)


def solve_gamma(xi: float, z: np.ndarray, scenario: Scenario, anchors: list[ScaAnchor],
                config: SolverConfig | None = None) -> float:
    """Power-budget multiplier at the given bandwidth price: zero when the
    budget is slack, otherwise the bisection root of sum(p) = p_total."""
    config = config or SolverConfig()
    if float(np.sum(scenario.p_min())) > scenario.p_total * (1.0 + BUDGET_SLACK):
        raise FeasibilityError("sum of minimum powers exceeds the power budget")
    U = _user_table(scenario, anchors)
    n = scenario.n_users
    out_p, out_B = np.empty(n), np.empty(n)
    out_sv = np.zeros(n, dtype=np.bool_)
    gamma = _solve_gamma_kernel(xi, U, np.asarray(z, dtype=float), scenario.w1, scenario.p_total,
                                scenario.p_total, B_FLOOR, scenario.b_total,
                                _inner_tol(config), config.bisect_tol, config.bisect_max_iter,
                                0.0, out_p, out_B, out_sv)
    return float(gamma)


def solve_xi(z: np.ndarray, scenario: Scenario, anchors: list[ScaAnchor],
             config: SolverConfig | None = None) -> float:
    """Bandwidth-budget multiplier, with the power multiplier re-solved
    inside every trial."""
    config = config or SolverConfig()
    U = _user_table(scenario, anchors)
    n = scenario.n_users
    out_p, out_B = np.empty(n), np.empty(n)
    out_sv = np.zeros(n, dtype=np.bool_)
    xi, _ = _solve_xi_kernel(U, np.asarray(z, dtype=float), scenario.w1, scenario.p_total,
                             scenario.b_total, scenario.p_total, B_FLOOR,
                             _inner_tol(config), config.bisect_tol, config.bisect_max_iter,
                             0.0, 0.0, out_p, out_B, out_sv)
    return float(xi)


def solve_S(z: np.ndarray, scenario: Scenario, config: SolverConfig | None = None) -> np.ndarray:
    """Per-user semantic sizes: unique root of W'(s) + 2*w1*z*s, clamped at
    the per-user cap."""
    config = config or SolverConfig()
    anchors = [ScaAnchor(scenario.b_total / scenario.n_users)] * scenario.n_users  # anchors irrelevant to s
    U = _user_table(scenario, anchors)
    out_s = np.empty(scenario.n_users)
    _solve_s_kernel(U, np.asarray(z, dtype=float), scenario.w1, scenario.w2,
                    S_FLOOR, _inner_tol(config), config.bisect_max_iter, out_s)
    return out_s


def _equal_spread_allocation(scenario: Scenario, s_value: np.ndarray | None = None) -> Allocation:
    n = scenario.n_users
    p_min = scenario.p_min()
    spread = (scenario.p_total - float(np.sum(p_min))) / n
    p = p_min + max(spread, 0.0)
    b = np.full(n, scenario.b_total / n)
    s = scenario.s_max() if s_value is None else s_value
    return Allocation(p, b, s)


def kkt_solve(z: np.ndarray, anchors: list[ScaAnchor], scenario: Scenario,
              config: SolverConfig | None = None,
              warm: tuple[float, float] | None = None) -> KktResult:
    """Solve the inner convex problem to optimality for a fixed auxiliary z.

    Composition: bandwidth price -> nested power price -> per-user powers and
    bandwidths -> per-user sizes, then dual reconstruction for the clamped
    coordinates.  The returned point satisfies the stationarity system,
    complementary slackness, and primal/dual feasibility to within the
    bisection tolerance.
    """
    return _kkt_solve_from_table(_user_table(scenario, anchors), z, scenario,
                                 config or SolverConfig(), warm)


def _kkt_solve_from_table(U: np.ndarray, z: np.ndarray, scenario: Scenario,
                          config: SolverConfig, warm: tuple[float, float] | None) -> KktResult:
    z = np.asarray(z, dtype=float)
    n = scenario.n_users
    if np.any(z <= 0):
        raise DomainError("auxiliaries must be strictly positive")
    if float(np.sum(scenario.p_min())) > scenario.p_total * (1.0 + BUDGET_SLACK):
        raise FeasibilityError("sum of minimum powers exceeds the power budget")
    w1, w2 = scenario.w1, scenario.w2
    out_s = np.empty(n)
    _solve_s_kernel(U, z, w1, w2, S_FLOOR, _inner_tol(config), config.bisect_max_iter, out_s)

    if w1 == 0.0:
        # latency has no weight: any feasible (p, B) is optimal and the size
        # cap binds; the equal spread satisfies the stationarity system with
        # all shared prices at zero
        alloc = _equal_spread_allocation(scenario, out_s)
        mult = KktMultipliers(
            alpha=np.array([w2 * u.cost.c5 * math.exp(-u.cost.c5 * u.cost.s_max) for u in scenario.users]),
            beta=np.zeros(n), gamma=0.0, xi=0.0,
        )
        residuals = _kkt_residuals(U, alloc, mult, z, scenario)
        return KktResult(alloc, mult, residuals, ())

    out_p, out_B = np.empty(n), np.empty(n)
    out_sv = np.zeros(n, dtype=np.bool_)
    xi_warm, gamma_warm = warm if warm is not None else (0.0, 0.0)
    xi, gamma = _solve_xi_kernel(U, z, w1, scenario.p_total, scenario.b_total,
                                 scenario.p_total, B_FLOOR,
                                 _inner_tol(config), config.bisect_tol, config.bisect_max_iter,
                                 xi_warm, gamma_warm, out_p, out_B, out_sv)
    alloc = Allocation(out_p.copy(), out_B.copy(), out_s)
    starved = tuple(int(i) for i in np.nonzero(out_sv)[0])
    if starved and all(out_sv):
        raise RateError("every user has a non-positive bandwidth marginal; scenario is degenerate")

    mult = _reconstruct_multipliers(U, alloc, float(xi), float(gamma), z, scenario)
    residuals = _kkt_residuals(U, alloc, mult, z, scenario)
    return KktResult(alloc, mult, residuals, starved)


def _marginals_arr(U: np.ndarray, p: np.ndarray, b: np.ndarray, z: np.ndarray, w1: float):
    """Objective marginals of power and bandwidth at the given point."""
    r = _surrogate_rates_arr(U, p, b)
    x = U[:, _SNRC] * p / b
    with np.errstate(divide="ignore", over="ignore"):
        coef = np.where(r > 0, w1 / (4.0 * r ** 3 * z), np.inf)
        phi_p = coef * U[:, _KAPPA] / (1.0 + x)
        rb = (np.log1p(x) - x / (1.0 + x)) / LN2 - U[:, _E0]
        phi_b = coef * rb
    return phi_p, phi_b


def _reconstruct_multipliers(U: np.ndarray, alloc: Allocation, xi: float, gamma: float,
                             z: np.ndarray, scenario: Scenario) -> KktMultipliers:
    n = scenario.n_users
    phi_p, phi_b = _marginals_arr(U, alloc.p, alloc.b, z, scenario.w1)
    p_min = U[:, _PMIN]
    s_max = U[:, _SMAX]

    # shared prices returned as zero while the budget is exactly exhausted
    # happen only when every user sits at its cap sentinel (single-user
    # scenarios); the true multiplier is the common marginal there
    if gamma == 0.0 and abs(float(np.sum(alloc.p)) - scenario.p_total) <= 1e-9 * scenario.p_total:
        finite = phi_p[np.isfinite(phi_p)]
        if finite.size == n:
            gamma = float(np.max(finite))
    if xi == 0.0 and abs(float(np.sum(alloc.b)) - scenario.b_total) <= 1e-9 * scenario.b_total:
        finite = phi_b[np.isfinite(phi_b)]
        if finite.size == n:
            xi = max(0.0, float(np.max(finite)))

    beta = np.zeros(n)
    at_floor = alloc.p <= p_min * (1.0 + 1e-12)
    beta[at_floor] = np.maximum(0.0, gamma - phi_p[at_floor])

    alpha = np.zeros(n)
    at_cap = alloc.s >= s_max * (1.0 - 1e-12)
    if at_cap.any():
        g_cap = _wprime_arr(U, s_max, scenario.w1, scenario.w2) + 2.0 * scenario.w1 * z * s_max
        alpha[at_cap] = np.maximum(0.0, -g_cap[at_cap])
    return KktMultipliers(alpha=alpha, beta=beta, gamma=float(gamma), xi=float(xi))


def _kkt_residuals(U: np.ndarray, alloc: Allocation, mult: KktMultipliers, z: np.ndarray,
                   scenario: Scenario) -> KktResidualReport:
    phi_p, phi_b = _marginals_arr(U, alloc.p, alloc.b, z, scenario.w1)
    tiny = 1e-30
    scale_p = np.maximum.reduce([np.abs(phi_p), mult.beta, np.full_like(phi_p, mult.gamma), np.full_like(phi_p, tiny)])
    st_p = np.abs(-phi_p - mult.beta + mult.gamma) / scale_p
    scale_b = np.maximum.reduce([np.abs(phi_b), np.full_like(phi_b, mult.xi), np.full_like(phi_b, tiny)])
    st_b = np.abs(-phi_b + mult.xi) / scale_b
    slope = _wprime_arr(U, alloc.s, scenario.w1, scenario.w2)
    pull = 2.0 * scenario.w1 * z * alloc.s
    scale_s = np.maximum.reduce([np.abs(slope), np.abs(pull), mult.alpha, np.full_like(slope, tiny)])
    st_s = np.abs(slope + pull + mult.alpha) / scale_s

    s_max = U[:, _SMAX]
    p_min = U[:, _PMIN]
    cs = np.array([
        float(np.max(np.abs(mult.alpha * (alloc.s - s_max)) / np.maximum(np.abs(mult.alpha) * s_max, tiny))),
        float(np.max(np.abs(mult.beta * (p_min - alloc.p)) / np.maximum(np.abs(mult.beta) * np.maximum(p_min, tiny), tiny))),
        abs(mult.gamma * (float(np.sum(alloc.p)) - scenario.p_total)) / max(mult.gamma * scenario.p_total, tiny),
        abs(mult.xi * (float(np.sum(alloc.b)) - scenario.b_total)) / max(mult.xi * scenario.b_total, tiny),
    ])
    report = check_feasible(alloc, scenario)
    primal = 0.0
    for v in report.violations:
        ref = {"p_min": 1.0, "p_total": scenario.p_total, "b_total": scenario.b_total}.get(v.constraint, 1.0)
        primal = max(primal, v.slack / max(ref, tiny))
    dual_min = float(min(np.min(mult.alpha), np.min(mult.beta), mult.gamma, mult.xi))
    return KktResidualReport(st_p, st_b, st_s, cs, primal, dual_min)


def surrogate_objective(alloc: Allocation, scenario: Scenario, anchors: list[ScaAnchor]) -> float:
    """Objective of the linearized problem at the given anchors."""
    return semcost.objective(alloc, scenario, anchors=anchors)


def fractional_programming(anchors: list[ScaAnchor], init_alloc: Allocation, scenario: Scenario,
                           config: SolverConfig | None = None, *,
                           z0: np.ndarray | None = None,
                           warm_state: dict | None = None,
                           trace: list[TraceRecord] | None = None,
                           k: int = 0, z_warm_started: bool = False) -> FpResult:
    """Alternate the auxiliary update and the KKT solve until the auxiliaries
    stop moving (relative, max over users) or the iteration cap is reached.

    The surrogate objective is non-increasing across iterations: the KKT
    step minimizes the transformed problem at fixed z, and the closed-form
    z-update minimizes it at fixed variables.
    """
    config = config or SolverConfig()
    U = _user_table(scenario, anchors)
    if z0 is not None:
        z = np.asarray(z0, dtype=float)
    else:
        r = _surrogate_rates_arr(U, init_alloc.p, init_alloc.b)
        if np.any(r <= 0) or np.any(init_alloc.s <= 0):
            raise RateError("initial point has a non-positive surrogate rate or size")
        z = 1.0 / (2.0 * r * init_alloc.s)
    alloc = init_alloc
    warm = warm_state if warm_state is not None else {}
    n_it = 0
    for j in range(1, config.j_max + 1):
        n_it = j
        result = _kkt_solve_from_table(U, z, scenario, config, warm.get("xi_gamma"))
        warm["xi_gamma"] = (result.multipliers.xi, result.multipliers.gamma)
        alloc = result.allocation
        r = _surrogate_rates_arr(U, alloc.p, alloc.b)
        if np.any(r <= 0):
            raise RateError("KKT step produced a non-positive surrogate rate")
        z_new = 1.0 / (2.0 * r * alloc.s)
        if trace is not None:
            trace.append(TraceRecord(
                k=k, j=j,
                surrogate_objective=_objective_arr(U, alloc.p, alloc.b, alloc.s,
                                                   scenario.w1, scenario.w2, exact=False),
                exact_objective=_objective_arr(U, alloc.p, alloc.b, alloc.s,
                                               scenario.w1, scenario.w2, exact=True),
                max_kkt_residual=result.residuals.max_residual,
                p=alloc.p.copy(), b=alloc.b.copy(), s=alloc.s.copy(),
                z_warm_started=z_warm_started,
                starved_users=result.starved,
            ))
        rel = float(np.max(np.abs(z_new - z) / np.maximum(np.abs(z), 1e-300)))
        z = z_new
        if rel <= config.bisect_tol:
            break
    return FpResult(alloc, z, n_it)


def default_initial_allocation(scenario: Scenario) -> Allocation:
    """Deterministic feasible start: minimum powers plus an equal spread of
    the remaining budget, equal bandwidth split, half the size cap."""
    return _equal_spread_allocation(scenario, scenario.s_max() / 2.0)


def evaluate_metrics(alloc: Allocation, scenario: Scenario) -> MetricsReport:
    """Exact-rate metrics of an allocation."""
    n = scenario.n_users
    t1 = np.empty(n)
    t2 = np.empty(n)
    t3 = np.empty(n)
    rs = np.empty(n)
    um = np.empty(n)
    for i, prof in enumerate(scenario.users):
        t1[i], t2[i], t3[i] = semcost.latency_components(
            alloc.s[i], alloc.p[i], alloc.b[i], prof.link, prof.cost, user=i)
        rs[i] = channel.secrecy_rate(alloc.p[i], alloc.b[i], prof.link, user=i)
        um[i] = semcost.utility(alloc.s[i], prof.cost)
    total_t = float(np.sum(t1 + t2 + t3))
    total_u = float(np.sum(um))
    return MetricsReport(t1, t2, t3, rs, um, total_t, total_u,
                         scenario.w1 * total_t - scenario.w2 * total_u)


def resource_allocation(scenario: Scenario, config: SolverConfig | None = None,
                        init: Allocation | None = None) -> SolveResult:
    """Full outer loop: anchor at the current bandwidths, run the
    fractional-programming inner loop, re-anchor, and stop once the max
    relative change of the concatenated (p, B, S) vector falls below eps0.

    Non-convergence within the cap returns the last (best, by monotone
    descent) iterate with the converged flag down.
    """
    config = config or SolverConfig()
    alloc = init if init is not None else default_initial_allocation(scenario)
    report = check_feasible(alloc, scenario)
    if not report.ok:
        raise FeasibilityError("initial allocation infeasible:\n" + report.describe())

    floors = np.concatenate([
        np.full(scenario.n_users, UNIT_FLOOR_P),
        np.full(scenario.n_users, UNIT_FLOOR_B),
        np.full(scenario.n_users, UNIT_FLOOR_S),
    ])
    trace: list[TraceRecord] = []
    warm: dict = {}
    converged = False
    n_fp_total = 0
    k_used = 0
    anchors = [ScaAnchor(float(b)) for b in alloc.b]
    for k in range(1, config.k_max + 1):
        k_used = k
        if k <= config.i_max:
            anchors = [ScaAnchor(float(b)) for b in alloc.b]
        prev = alloc.concatenated()
        fp = fractional_programming(anchors, alloc, scenario, config,
                                    warm_state=warm, trace=trace, k=k,
                                    z_warm_started=k > 1)
        alloc = fp.allocation
        n_fp_total += fp.n_iterations
        delta = float(np.max(np.abs(alloc.concatenated() - prev) / np.maximum(np.abs(prev), floors)))
        if delta <= config.eps0:
            converged = True
            break
    metrics = evaluate_metrics(alloc, scenario)
    return SolveResult(alloc, metrics, trace, converged, k_used, n_fp_total)
