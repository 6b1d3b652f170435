"""Independent validation oracles: exhaustive grid search over small
instances and central finite differences for the analytic derivatives.

Everything here evaluates the objective through the channel/cost primitives
only; nothing imports the solver's root-finding machinery, so agreement
between the two is meaningful evidence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import channel, semcost
from .channel import B_FLOOR, LN2, ScaAnchor
from .errors import DomainError, GridGuardError
from .scenario import Allocation, Scenario
from .semcost import S_FLOOR

# Hard cap on objective evaluations per grid search.
MAX_EVALUATIONS = int(1e8)


@dataclass(frozen=True)
class GridSpec:
    """Resolution of the brute-force search."""

    points_per_axis: int = 32
    refine: int = 1          # zoom-in passes around the incumbent best cell
    slack_points: int = 9    # coarse sub-grid sampling budget-slack splits

    def __post_init__(self):
        if self.points_per_axis < 3:
            raise DomainError("need at least 3 points per axis")


def finite_diff(fn, point, *, rel_step: float = 1e-6, unit: float | np.ndarray = 1.0):
    """Central-difference gradient estimate with a step-halving error bound.

    Steps are per-coordinate: h = max(rel_step*|x|, 1e-9*unit).  Returns
    (gradient, error_estimate) where the error estimate is the difference
    against a half-step evaluation.
    """
    x = np.asarray(point, dtype=float)
    unit = np.broadcast_to(np.asarray(unit, dtype=float), x.shape)
    grad = np.empty_like(x)
    err = np.empty_like(x)
    for i in range(x.size):
        h = max(rel_step * abs(x[i]), 1e-9 * unit[i])
        grad[i] = _central(fn, x, i, h)
        half = _central(fn, x, i, h / 2.0)
        if not np.isfinite(grad[i]) or not np.isfinite(half):
            raise DomainError("non-finite evaluation in finite differences")
        err[i] = abs(half - grad[i])
        grad[i] = half  # the half step is the better estimate
    if x.ndim == 0 or x.size == 1:
        return float(grad.reshape(-1)[0]), float(err.reshape(-1)[0])
    return grad, err


def _central(fn, x, i, h):
    hi = x.copy()
    lo = x.copy()
    hi[i] += h
    lo[i] -= h
    return (fn(hi) - fn(lo)) / (2.0 * h)


def _per_user_tables(scenario: Scenario, anchors: list[ScaAnchor]):
    snrc = np.array([u.link.snr_coeff for u in scenario.users])
    e0 = np.array([channel.d_eavesdrop_dB(a.b_anchor, u.link)
                   for u, a in zip(scenario.users, anchors)])
    c0 = np.array([e * a.b_anchor - channel.eavesdrop_rate(a.b_anchor, u.link)
                   for u, a, e in zip(scenario.users, anchors, e0)])
    return snrc, e0, c0


def _best_s_for_t2_coeff(scenario: Scenario, n: int, t2_coeff: np.ndarray, s_grid: np.ndarray):
    """Minimize the per-user terms over the size grid for every rate column.

    t2_coeff is 1/R per candidate (one row per grid combination); the other
    size terms do not depend on (p, B), so each combination just picks the
    best grid size independently.
    """
    prof = scenario.users[n]
    w1, w2 = scenario.w1, scenario.w2
    static = w1 * (semcost.server_cycles(s_grid, prof.cost) / prof.cost.f_server
                   + semcost.user_cycles(s_grid, prof.cost) / prof.cost.g_user) \
        - w2 * semcost.utility(s_grid, prof.cost)
    # combination x size matrix: static[j] + w1 * s[j] / R[i]
    values = static[None, :] + w1 * np.outer(t2_coeff, s_grid)
    best_idx = np.argmin(values, axis=1)
    return values[np.arange(len(t2_coeff)), best_idx], s_grid[best_idx]


def _axis_grid(lo: float, hi: float, m: int) -> np.ndarray:
    return np.linspace(lo, hi, m)


def surrogate_rate_cols(snrc, e0, c0, p_cols, b_cols):
    return b_cols * (np.log1p(snrc * p_cols / b_cols) / LN2 - e0) + c0


def grid_search(scenario: Scenario, anchors: list[ScaAnchor], grid: GridSpec | None = None,
                z_policy: str = "optimal-z") -> tuple[Allocation, float]:
    """Exhaustive minimization of the linearized objective on a feasible grid.

    Power and bandwidth budgets are handled by enumerating exhausting splits
    (the per-user shares sum exactly to the budget) plus a coarse sub-grid of
    slack splits, so activeness of the budget constraints is sampled rather
    than assumed.  Sizes are optimized per user on their own grid, which is
    exact for this objective because the size terms are separable.

    With the default z_policy "optimal-z" the reported value is the linearized
    objective itself; the transformed objective at z = 1/(2*R*s) is
    identical, which is asserted cheaply here for every incumbent.
    """
    grid = grid or GridSpec()
    if z_policy not in ("optimal-z",):
        raise DomainError(f"unknown z policy {z_policy!r}")
    n = scenario.n_users
    if n > 3:
        raise GridGuardError("grid oracle only supports up to 3 users")
    m = grid.points_per_axis
    est = (m ** (n - 1)) ** 2 * m * n if n > 1 else m ** 2 * m
    if est > MAX_EVALUATIONS:
        raise GridGuardError(f"grid of ~{est:.2e} evaluations exceeds the {MAX_EVALUATIONS:.0e} cap")

    p_min = scenario.p_min()
    s_max = scenario.s_max()
    s_grids = [np.geomspace(S_FLOOR, s_max[i], m) for i in range(n)]
    snrc, e0, c0 = _per_user_tables(scenario, anchors)

    best_val = np.inf
    best = None

    for p_split, b_split in _split_iterator(scenario, grid, p_min):
        # p_split/b_split: (n_comb, n) arrays of candidate budget splits
        n_comb = p_split.shape[0]
        total = np.zeros(n_comb)
        s_choice = np.empty((n_comb, n))
        ok = np.ones(n_comb, dtype=bool)
        for i in range(n):
            r = surrogate_rate_cols(snrc[i], e0[i], c0[i], p_split[:, i], b_split[:, i])
            ok &= r > 0
            t2_coeff = np.where(r > 0, 1.0 / np.where(r > 0, r, 1.0), np.inf)
            vals, s_best = _best_s_for_t2_coeff(scenario, i, t2_coeff, s_grids[i])
            total += vals
            s_choice[:, i] = s_best
        total[~ok] = np.inf
        idx = int(np.argmin(total))
        if total[idx] < best_val:
            best_val = float(total[idx])
            best = Allocation(p_split[idx].copy(), b_split[idx].copy(), s_choice[idx].copy())

    if best is None or not np.isfinite(best_val):
        raise GridGuardError("no feasible grid point found")

    for _ in range(grid.refine):
        best, best_val = _refine_around(scenario, anchors, grid, best, best_val,
                                        snrc, e0, c0, s_grids)

    # transformed-objective identity at the optimal auxiliary
    r_best = surrogate_rate_cols(snrc, e0, c0, best.p, best.b)
    z_best = 1.0 / (2.0 * r_best * best.s)
    quad = best.s ** 2 * z_best + 1.0 / (4.0 * r_best ** 2 * z_best)
    assert np.allclose(quad, best.s / r_best, rtol=1e-9)
    return best, best_val


def _split_iterator(scenario: Scenario, grid: GridSpec, p_min: np.ndarray):
    """Yield (p_splits, b_splits) blocks covering exhausting and slack splits."""
    n = scenario.n_users
    m = grid.points_per_axis
    if n == 1:
        p = _axis_grid(p_min[0], scenario.p_total, m)
        b = _axis_grid(B_FLOOR, scenario.b_total, m)
        pp, bb = np.meshgrid(p, b, indexing="ij")
        yield pp.reshape(-1, 1), bb.reshape(-1, 1)
        return
    if n == 2:
        # exhausting splits on both budgets
        p1 = _axis_grid(p_min[0], scenario.p_total - p_min[1], m)
        b1 = _axis_grid(B_FLOOR, scenario.b_total - B_FLOOR, m)
        pp = np.stack([p1, scenario.p_total - p1], axis=1)
        bb = np.stack([b1, scenario.b_total - b1], axis=1)
        pi, bi = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
        yield pp[pi.ravel()], bb[bi.ravel()]
        # coarse slack sub-grid: neither budget exhausted
        ms = grid.slack_points
        fr = np.linspace(0.15, 0.95, ms)
        combos_p = []
        combos_b = []
        for f1 in fr:
            for f2 in fr:
                if f1 + f2 < 1.0:
                    combos_p.append([max(f1 * scenario.p_total, p_min[0]),
                                     max(f2 * scenario.p_total, p_min[1])])
                    combos_b.append([f1 * scenario.b_total, f2 * scenario.b_total])
        cp = np.array(combos_p)
        cb = np.array(combos_b)
        pi, bi = np.meshgrid(np.arange(len(cp)), np.arange(len(cb)), indexing="ij")
        yield cp[pi.ravel()], cb[bi.ravel()]
        return
    # n == 3: exhausting splits via a 2-simplex grid per budget
    m3 = max(8, grid.points_per_axis // 2)
    fracs = []
    for i in range(m3 + 1):
        for j in range(m3 + 1 - i):
            fracs.append((i / m3, j / m3, (m3 - i - j) / m3))
    fr = np.array(fracs)
    p_splits = p_min[None, :] + fr * (scenario.p_total - p_min.sum())
    b_splits = B_FLOOR + fr * (scenario.b_total - 3 * B_FLOOR)
    pi, bi = np.meshgrid(np.arange(len(p_splits)), np.arange(len(b_splits)), indexing="ij")
    yield p_splits[pi.ravel()], b_splits[bi.ravel()]


def _refine_around(scenario, anchors, grid, best, best_val, snrc, e0, c0, s_grids):
    """One zoom pass: re-grid each axis inside +-1.5 coarse cells of the best."""
    n = scenario.n_users
    m = grid.points_per_axis
    p_min = scenario.p_min()
    s_max = scenario.s_max()

    def window(center, lo, hi, width):
        a = max(lo, center - width)
        b = min(hi, center + width)
        if b <= a:
            a, b = lo, hi
        return _axis_grid(a, b, m)

    if n == 1:
        wp = (scenario.p_total - p_min[0]) / (m - 1) * 1.5
        wb = (scenario.b_total - B_FLOOR) / (m - 1) * 1.5
        p = window(best.p[0], p_min[0], scenario.p_total, wp)
        b = window(best.b[0], B_FLOOR, scenario.b_total, wb)
        pp, bb = np.meshgrid(p, b, indexing="ij")
        p_split, b_split = pp.reshape(-1, 1), bb.reshape(-1, 1)
    elif n == 2:
        wp = (scenario.p_total - p_min.sum()) / (m - 1) * 1.5
        wb = scenario.b_total / (m - 1) * 1.5
        p1 = window(best.p[0], p_min[0], scenario.p_total - p_min[1], wp)
        b1 = window(best.b[0], B_FLOOR, scenario.b_total - B_FLOOR, wb)
        pp = np.stack([p1, scenario.p_total - p1], axis=1)
        bb = np.stack([b1, scenario.b_total - b1], axis=1)
        pi, bi = np.meshgrid(np.arange(len(p1)), np.arange(len(b1)), indexing="ij")
        p_split, b_split = pp[pi.ravel()], bb[bi.ravel()]
    else:
        return best, best_val

    # sizes refined around the incumbent too
    s_grids = [np.geomspace(max(S_FLOOR, best.s[i] / 4.0), min(s_max[i], best.s[i] * 4.0), m)
               for i in range(n)]

    n_comb = p_split.shape[0]
    total = np.zeros(n_comb)
    s_choice = np.empty((n_comb, n))
    ok = np.ones(n_comb, dtype=bool)
    for i in range(n):
        r = surrogate_rate_cols(snrc[i], e0[i], c0[i], p_split[:, i], b_split[:, i])
        ok &= r > 0
        t2_coeff = np.where(r > 0, 1.0 / np.where(r > 0, r, 1.0), np.inf)
        vals, s_best = _best_s_for_t2_coeff(scenario, i, t2_coeff, s_grids[i])
        total += vals
        s_choice[:, i] = s_best
    total[~ok] = np.inf
    idx = int(np.argmin(total))
    if total[idx] < best_val:
        return Allocation(p_split[idx].copy(), b_split[idx].copy(), s_choice[idx].copy()), float(total[idx])
    return best, best_val
