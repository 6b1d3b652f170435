"""Scenario generation, baseline allocations, budget sweeps, and results
persistence for the comparative experiments.

Everything here is seed-deterministic: the same spec, seed, and solver
configuration produce bit-identical CSV output regardless of thread count.
"""

from __future__ import annotations

import datetime as _dt
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import channel, semcost
from .channel import LinkParams
from .errors import DomainError, FeasibilityError
from .scenario import Allocation, Scenario, UserProfile
from .semcost import S_FLOOR, SemanticCostParams
from .solver import SolverConfig, check_feasible, evaluate_metrics, resource_allocation

log = logging.getLogger("secomm.harness")

CSV_HEADER = "axis,axis_value,method,w1,w2,T_total_s,U_total,objective,converged,iters_outer,iters_fp_total,wall_ms"

# Weight pairs the proposed method is swept at, and the single pair used by
# both baselines (no preference between latency and utility).
PROPOSED_WEIGHTS = ((0.3, 0.7), (0.5, 0.5), (0.7, 0.3))
BASELINE_WEIGHTS = (0.5, 0.5)

# Each sweep point reports the random baseline by its lower-median draw so
# the recorded T/U/objective triple comes from one self-consistent allocation.
RANDOM_DRAWS = 20


@dataclass(frozen=True)
class ScenarioSpec:
    """Reproducible recipe for a scenario; same spec + seed -> same Scenario."""

    n_users: int = 30
    cell_radius_km: float = 0.5
    seed: int = 2023
    noise_psd_dbm_hz: float = -174.0
    b_total_hz: float = 10e6
    p_total_dbm: float = 40.0
    w1: float = 0.5
    w2: float = 0.5
    p_min_dbm: float = 0.0
    s_max_bits: float = 2.4e8
    f_server_hz: float = 10e9
    g_user_hz: float = 2e9
    d_data_bits: float = 8e8
    c1_cycles: float = 5e9
    c2_exponent: int = 2
    c3_cycles: float = 1e12
    c4_exponent: float = 1.0
    # utility saturates at 0.9 when the semantic size reaches the default cap
    c5_per_bit: float = float(np.log(10.0)) / 2.4e8
    y2_cycles_per_bit: float = 1.0
    shadow_std_db: float = 8.0
    eve_ratio: float = 0.1  # eavesdropper SNR product as a fraction of p_min*h/noise

    def __post_init__(self):
        if self.n_users < 1 or self.cell_radius_km <= 0:
            raise DomainError("n_users must be >= 1 and cell_radius_km positive")
        if not (0 <= self.eve_ratio < 1):
            raise DomainError("eve_ratio must lie in [0, 1) to keep the secrecy condition satisfiable")


def generate_scenario(spec: ScenarioSpec) -> Scenario:
    """Drop users uniformly in a disk, apply path loss plus log-normal shadow
    fading, and fill in the cost-model defaults.

    Per-user randomness comes from a substream keyed by (seed, user index),
    so user i is identical across runs and across different n_users.
    """
    noise = float(channel.dbm_to_watt(spec.noise_psd_dbm_hz))
    p_min = float(channel.dbm_to_watt(spec.p_min_dbm))
    p_total = float(channel.dbm_to_watt(spec.p_total_dbm))
    users = []
    for i in range(spec.n_users):
        rng = np.random.default_rng([spec.seed, i])
        radius = spec.cell_radius_km * np.sqrt(rng.uniform())
        rng.uniform()  # angle; the loss model only needs the distance
        distance = max(radius, 1e-3)  # keep users off the base station itself
        shadow = rng.normal(0.0, spec.shadow_std_db)
        h = channel.gain_from_loss(channel.path_loss_db(distance), shadow)
        link = LinkParams(
            h=h,
            noise_var=noise,
            eve_p=spec.eve_ratio * p_min,
            eve_h=h,
            eve_noise_var=noise,
        )
        cost = SemanticCostParams(
            d_data=spec.d_data_bits,
            c1=spec.c1_cycles,
            c2=spec.c2_exponent,
            c3=spec.c3_cycles,
            c4=spec.c4_exponent,
            c5=spec.c5_per_bit,
            y2_coeff=spec.y2_cycles_per_bit,
            f_server=spec.f_server_hz,
            g_user=spec.g_user_hz,
            s_max=spec.s_max_bits,
            p_min=p_min,
        )
        users.append(UserProfile(link, cost))
    return Scenario(users=tuple(users), p_total=p_total, b_total=spec.b_total_hz,
                    w1=spec.w1, w2=spec.w2)


def baseline_random(scenario: Scenario, seed: int) -> Allocation:
    """Random baseline: uniform size draw, then uniform-simplex power and
    bandwidth shares; powers below the per-user floor are lifted and the
    remainder renormalized so the result is always feasible."""
    rng = np.random.default_rng(seed)
    n = scenario.n_users
    s_max = scenario.s_max()
    s = rng.uniform(S_FLOOR, s_max)
    p = _simplex_shares(rng, n) * scenario.p_total
    p = _lift_to_minimums(p, scenario.p_min(), scenario.p_total)
    b = _simplex_shares(rng, n) * scenario.b_total
    alloc = Allocation(p, b, s)
    report = check_feasible(alloc, scenario)
    if not report.ok:
        raise FeasibilityError("random baseline infeasible:\n" + report.describe())
    return alloc


def _simplex_shares(rng: np.random.Generator, n: int) -> np.ndarray:
    gaps = rng.exponential(1.0, n)
    return gaps / gaps.sum()


def _lift_to_minimums(p: np.ndarray, p_min: np.ndarray, p_total: float) -> np.ndarray:
    """Raise entries below their floor, shrinking the free entries to keep
    the total.  Lifted entries stay pinned, so the pass count is bounded by
    the user count and the result never exceeds the budget."""
    if float(np.sum(p_min)) > p_total * (1 + 1e-12):
        raise FeasibilityError("budgets too tight to lift all powers to their floors")
    p = p.copy()
    pinned = np.zeros(len(p), dtype=bool)
    for _ in range(len(p) + 1):
        need = (p < p_min) & ~pinned
        if not need.any():
            break
        pinned |= need
        p[pinned] = p_min[pinned]
        free = ~pinned
        free_sum = float(np.sum(p[free]))
        if free_sum > 0:
            p[free] *= (p_total - float(np.sum(p_min[pinned]))) / free_sum
    return p


def baseline_equal(scenario: Scenario) -> Allocation:
    """Equal split of both budgets; sizes at half the cap."""
    n = scenario.n_users
    p_share = scenario.p_total / n
    p_min = scenario.p_min()
    if np.any(p_share < p_min):
        raise FeasibilityError("equal power share falls below a per-user minimum")
    return Allocation(np.full(n, p_share), np.full(n, scenario.b_total / n), scenario.s_max() / 2.0)


@dataclass
class SweepRow:
    axis_value: float
    method: str
    w1: float
    w2: float
    t_total_s: float
    u_total: float
    objective: float
    converged: bool
    iters_outer: int
    iters_fp_total: int


@dataclass
class SweepResult:
    axis: str
    values: list[float]
    rows: list[SweepRow]
    timings_ms: dict = field(default_factory=dict)  # (axis_value, method, w1) -> wall ms


def _apply_axis(spec: ScenarioSpec, axis: str, value: float) -> ScenarioSpec:
    if axis == "p_total":
        return replace(spec, p_total_dbm=float(channel.watt_to_dbm(value)))
    if axis == "b_total":
        return replace(spec, b_total_hz=value)
    if axis == "s_max":
        return replace(spec, s_max_bits=value)
    raise DomainError(f"unknown sweep axis {axis!r}; expected p_total, b_total, or s_max")


def _evaluate_fixed(alloc: Allocation, scenario: Scenario, w1: float, w2: float):
    m = evaluate_metrics(alloc, scenario)
    return m.total_latency, m.total_utility, w1 * m.total_latency - w2 * m.total_utility


def _run_point(spec: ScenarioSpec, axis: str, value: float, config: SolverConfig):
    """All method rows for one axis value, in deterministic method order."""
    scn_spec = _apply_axis(spec, axis, value)
    rows: list[SweepRow] = []
    timings: dict = {}

    # equal baseline
    scenario = generate_scenario(replace(scn_spec, w1=BASELINE_WEIGHTS[0], w2=BASELINE_WEIGHTS[1]))
    t0 = time.perf_counter()
    t, u, obj = _evaluate_fixed(baseline_equal(scenario), scenario, *BASELINE_WEIGHTS)
    timings[(value, "equal", BASELINE_WEIGHTS[0])] = (time.perf_counter() - t0) * 1e3
    rows.append(SweepRow(value, "equal", *BASELINE_WEIGHTS, t, u, obj, True, 0, 0))

    # proposed at each weight pair
    for w1, w2 in PROPOSED_WEIGHTS:
        scenario = generate_scenario(replace(scn_spec, w1=w1, w2=w2))
        t0 = time.perf_counter()
        result = resource_allocation(scenario, config)
        timings[(value, "proposed", w1)] = (time.perf_counter() - t0) * 1e3
        m = result.metrics
        rows.append(SweepRow(value, "proposed", w1, w2, m.total_latency, m.total_utility,
                             m.objective, result.converged, result.n_outer, result.n_fp_total))

    # random baseline: lower-median draw by objective over RANDOM_DRAWS seeds
    scenario = generate_scenario(replace(scn_spec, w1=BASELINE_WEIGHTS[0], w2=BASELINE_WEIGHTS[1]))
    t0 = time.perf_counter()
    evals = []
    for d in range(RANDOM_DRAWS):
        alloc = baseline_random(scenario, seed=spec.seed + 7919 * d)
        evals.append(_evaluate_fixed(alloc, scenario, *BASELINE_WEIGHTS))
    evals.sort(key=lambda e: e[2])
    t, u, obj = evals[(RANDOM_DRAWS - 1) // 2]
    timings[(value, "random", BASELINE_WEIGHTS[0])] = (time.perf_counter() - t0) * 1e3
    rows.append(SweepRow(value, "random", *BASELINE_WEIGHTS, t, u, obj, True, 0, 0))

    rows.sort(key=lambda r: (r.method, r.w1))
    return rows, timings


def sweep(spec: ScenarioSpec, axis: str, values, config: SolverConfig | None = None,
          threads: int | None = None) -> SweepResult:
    """Re-generate the scenario at each axis value (same seed, only the swept
    constant changes) and run every method; rows ordered by (value, method)."""
    values = [float(v) for v in values]
    if not values or any(b <= a for a, b in zip(values, values[1:])):
        raise DomainError("sweep values must be non-empty and strictly ascending")
    config = config or SolverConfig()
    result = SweepResult(axis=axis, values=values, rows=[])
    points = list(enumerate(values))
    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_run_point, spec, axis, v, config) for _, v in points]
            outcomes = [f.result() for f in futures]
    else:
        outcomes = [_run_point(spec, axis, v, config) for _, v in points]
    for (_, value), (rows, timings) in zip(points, outcomes):
        result.rows.extend(rows)
        result.timings_ms.update(timings)
        log.info("sweep %s=%s done (%d rows)", axis, value, len(rows))
    return result


def _fmt(x: float) -> str:
    return repr(float(x))


def write_csv(result: SweepResult, path) -> None:
    lines = [CSV_HEADER]
    for r in result.rows:
        # wall time is not reproducible, so the CSV carries an empty field and
        # the measured values live in the run manifest
        lines.append(
            f"{result.axis},{_fmt(r.axis_value)},{r.method},{_fmt(r.w1)},{_fmt(r.w2)},"
            f"{_fmt(r.t_total_s)},{_fmt(r.u_total)},{_fmt(r.objective)},"
            f"{str(r.converged).lower()},{r.iters_outer},{r.iters_fp_total},"
        )
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_csv(path) -> SweepResult:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise DomainError(f"unexpected CSV header in {path}")
    rows = []
    axis = None
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(CSV_HEADER.split(",")):
            raise DomainError(f"malformed CSV row: {ln!r}")
        axis = parts[0]
        rows.append(SweepRow(
            axis_value=float(parts[1]), method=parts[2], w1=float(parts[3]), w2=float(parts[4]),
            t_total_s=float(parts[5]), u_total=float(parts[6]), objective=float(parts[7]),
            converged=parts[8] == "true", iters_outer=int(parts[9]), iters_fp_total=int(parts[10]),
        ))
    values = sorted({r.axis_value for r in rows})
    return SweepResult(axis=axis or "", values=values, rows=rows)


def persist(result: SweepResult, csv_path, manifest_path=None, *,
            spec: ScenarioSpec | None = None, config: SolverConfig | None = None) -> None:
    """Write the CSV plus a JSON run manifest (spec, config, seed, version,
    start stamp, and the measured per-point wall clock)."""
    from . import __version__

    write_csv(result, csv_path)
    if manifest_path is None:
        return
    manifest = {
        "spec": asdict(spec) if spec is not None else None,
        "config": asdict(config) if config is not None else None,
        "seed": spec.seed if spec is not None else None,
        "version": f"secomm-{__version__}",
        "started_utc": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "wall_ms_per_point": {f"{k[0]}|{k[1]}|{k[2]}": v for k, v in result.timings_ms.items()},
    }
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
