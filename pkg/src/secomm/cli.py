"""Command-line front end.

Subcommands: solve, sweep, verify, gen-scenario.  Exit codes are the only
machine contract: 0 success, 1 error, 2 non-convergence.  The SECOMM_LOG
environment variable sets the log level.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from dataclasses import replace
from importlib import resources

import numpy as np

from . import __version__, harness, oracle, runconfig
from .channel import ScaAnchor
from .errors import ConfigError, DomainError, FeasibilityError, GridGuardError, RateError
from .solver import check_feasible, kkt_solve, resource_allocation, update_z

log = logging.getLogger("secomm.cli")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2


def _setup_logging():
    level = os.environ.get("SECOMM_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _bundled_config(name: str) -> str:
    return str(resources.files("secomm").joinpath("configs", name))


def _load(args) -> tuple:
    path = args.config if args.config else _bundled_config("default.json")
    spec, cfg = runconfig.load_config(path)
    # flags mirror config keys one-to-one and win over the file
    overrides = {}
    for key in runconfig.KNOWN_KEYS:
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None:
            overrides[key] = flag
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        doc = {}
        doc.update(overrides)
        o_spec, o_cfg = runconfig.parse_config(doc)
        for key in overrides:
            if key in runconfig._SCENARIO_KEYS:
                field = runconfig._SCENARIO_KEYS[key][0]
                spec = replace(spec, **{field: getattr(o_spec, field)})
            else:
                field = runconfig._SOLVER_KEYS[key][0]
                cfg = replace(cfg, **{field: getattr(o_cfg, field)})
    return spec, cfg


def _alloc_payload(alloc, metrics=None):
    payload = {"p_w": alloc.p.tolist(), "b_hz": alloc.b.tolist(), "s_bits": alloc.s.tolist()}
    if metrics is not None:
        payload["metrics"] = {
            "t1_s": metrics.t1.tolist(),
            "t2_s": metrics.t2.tolist(),
            "t3_s": metrics.t3.tolist(),
            "secrecy_rate_bps": metrics.secrecy_rate.tolist(),
            "utility": metrics.utility.tolist(),
            "total_latency_s": metrics.total_latency,
            "total_utility": metrics.total_utility,
            "objective": metrics.objective,
        }
    return payload


def cmd_solve(args) -> int:
    spec, cfg = _load(args)
    scenario = harness.generate_scenario(spec)
    result = resource_allocation(scenario, cfg)
    payload = _alloc_payload(result.allocation, result.metrics)
    payload["converged"] = result.converged
    payload["n_outer"] = result.n_outer
    payload["n_fp_total"] = result.n_fp_total
    payload["trace"] = [
        {"k": t.k, "j": t.j, "surrogate_objective": t.surrogate_objective,
         "exact_objective": t.exact_objective, "max_kkt_residual": t.max_kkt_residual,
         "z_warm_started": t.z_warm_started, "starved_users": list(t.starved_users)}
        for t in result.trace
    ]
    out = args.out or "solution.json"
    with open(out, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    log.info("solution written to %s (objective %.6g)", out, result.metrics.objective)
    if not result.converged:
        print(f"not converged within k_max={cfg.k_max}; best-so-far written to {out}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    print(f"converged in {result.n_outer} outer iterations; objective {result.metrics.objective:.6g}")
    return EXIT_OK


def _parse_values(text: str) -> list[float]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"--values expects lo:hi:step or a comma list, got {text!r}")
        lo, hi, step = (float(x) for x in parts)
        if step <= 0 or hi < lo:
            raise ConfigError("--values range needs step > 0 and hi >= lo")
        out = []
        v = lo
        while v <= hi + 1e-9 * max(abs(hi), 1.0):
            out.append(round(v, 12))
            v += step
        return out
    return [float(x) for x in text.split(",") if x.strip()]


_AXES = {
    "p_total_dbm": ("p_total", lambda v: float(harness.channel.dbm_to_watt(v))),
    "b_total_mhz": ("b_total", lambda v: v * 1e6),
    "s_max_mbytes": ("s_max", lambda v: v * 8e6),
}


def cmd_sweep(args) -> int:
    spec, cfg = _load(args)
    if args.axis not in _AXES:
        print(f"unknown axis {args.axis!r}; expected one of {', '.join(_AXES)}", file=sys.stderr)
        return EXIT_ERROR
    harness_axis, conv = _AXES[args.axis]
    display_values = _parse_values(args.values)
    if not display_values:
        print("--values produced an empty list", file=sys.stderr)
        return EXIT_ERROR
    internal = [conv(v) for v in display_values]
    result = harness.sweep(spec, harness_axis, internal, cfg, threads=args.threads)
    # rows keep the CLI-level axis name and display units for plotting
    scale = {dv: iv for dv, iv in zip(display_values, internal)}
    inv = {iv: dv for dv, iv in scale.items()}
    result.axis = args.axis
    for row in result.rows:
        row.axis_value = inv.get(row.axis_value, row.axis_value)
    result.values = display_values
    out_dir = args.out_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, f"sweep_{args.axis}.csv")
    manifest_path = os.path.join(out_dir, f"sweep_{args.axis}.manifest.json")
    harness.persist(result, csv_path, manifest_path, spec=spec, config=cfg)
    n_unconverged = sum(1 for r in result.rows if not r.converged)
    print(f"wrote {csv_path} ({len(result.rows)} rows)")
    if n_unconverged:
        print(f"{n_unconverged} rows did not converge", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.config is None:
        args.config = _bundled_config("verify_n2.json")
    spec, cfg = _load(args)
    if spec.n_users > 3:
        print(f"verify requires n_users <= 3 (got {spec.n_users}); the grid oracle "
              "is only trustworthy at desk scale", file=sys.stderr)
        return EXIT_ERROR
    scenario = harness.generate_scenario(spec)
    result = resource_allocation(scenario, cfg)
    checks = []

    feas = check_feasible(result.allocation, scenario)
    checks.append(("allocation feasible", feas.ok))

    res = max(t.max_kkt_residual for t in result.trace[-1:])
    checks.append((f"max KKT residual {res:.2e} <= 1e-6", res <= 1e-6))

    anchors = [ScaAnchor(float(b)) for b in result.allocation.b]
    z = update_z(result.allocation, anchors, scenario)
    kr = kkt_solve(z, anchors, scenario, cfg)
    checks.append((f"re-solved KKT residual {kr.residuals.max_residual:.2e} <= 1e-6",
                   kr.residuals.max_residual <= 1e-6))

    grid_best, grid_val = oracle.grid_search(scenario, anchors, oracle.GridSpec(points_per_axis=48))
    from .solver import surrogate_objective
    solver_val = surrogate_objective(result.allocation, scenario, anchors)
    rel = (solver_val - grid_val) / max(abs(grid_val), 1e-30)
    checks.append((f"solver {solver_val:.6g} <= grid best {grid_val:.6g} + 2% ({rel:+.2%})",
                   rel <= 0.02))

    ok = True
    for label, passed in checks:
        print(("PASS " if passed else "FAIL ") + label)
        ok &= passed
    return EXIT_OK if ok else EXIT_ERROR


def cmd_gen_scenario(args) -> int:
    spec, _ = _load(args)
    scenario = harness.generate_scenario(spec)
    payload = {
        "n_users": scenario.n_users,
        "p_total_w": scenario.p_total,
        "b_total_hz": scenario.b_total,
        "w1": scenario.w1,
        "w2": scenario.w2,
        "users": [
            {
                "h": u.link.h, "noise_var_w_hz": u.link.noise_var,
                "eve_p_w": u.link.eve_p, "eve_h": u.link.eve_h,
                "eve_noise_var_w_hz": u.link.eve_noise_var,
                "p_min_w": u.cost.p_min, "s_max_bits": u.cost.s_max,
                "d_data_bits": u.cost.d_data,
                "f_server_hz": u.cost.f_server, "g_user_hz": u.cost.g_user,
            }
            for u in scenario.users
        ],
    }
    out = args.out or "scenario.json"
    with open(out, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    print(f"wrote {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="secomm",
                                     description="secure semantic-communication resource allocation")
    parser.add_argument("--version", action="version", version=f"secomm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="run configuration JSON (bundled default otherwise)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--threads", type=int, default=None,
                       help="worker cap for sweep points (default: all cores); output independent of it")
        for key in runconfig.KNOWN_KEYS:
            if key == "seed":
                continue
            p.add_argument(f"--{key.replace('_', '-')}", dest=key, default=None,
                           help=argparse.SUPPRESS)

    p_solve = sub.add_parser("solve", help="run the allocator on one scenario")
    common(p_solve)
    p_solve.add_argument("--out", help="output JSON path (default solution.json)")
    p_solve.set_defaults(fn=cmd_solve)

    p_sweep = sub.add_parser("sweep", help="run every method across a budget axis")
    common(p_sweep)
    p_sweep.add_argument("--axis", required=True, help="p_total_dbm | b_total_mhz | s_max_mbytes")
    p_sweep.add_argument("--values", required=True, help="lo:hi:step or comma list (axis units)")
    p_sweep.add_argument("--out-dir", help="directory for CSV + manifest (default .)")
    p_sweep.set_defaults(fn=cmd_sweep)

    p_verify = sub.add_parser("verify", help="grid-oracle and KKT-residual checks (n_users <= 3)")
    common(p_verify)
    p_verify.set_defaults(fn=cmd_verify)

    p_gen = sub.add_parser("gen-scenario", help="write the generated scenario as JSON")
    common(p_gen)
    p_gen.add_argument("--out", help="output JSON path (default scenario.json)")
    p_gen.set_defaults(fn=cmd_gen_scenario)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, DomainError, FeasibilityError, GridGuardError, RateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
