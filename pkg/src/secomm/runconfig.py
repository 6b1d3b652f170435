"""Run-configuration documents: a flat JSON object whose keys carry explicit
unit suffixes.  Unknown keys are rejected; missing keys take the documented
defaults."""

from __future__ import annotations

import json
from dataclasses import replace

from .errors import ConfigError
from .harness import ScenarioSpec
from .solver import SolverConfig

# key -> (target, field, converter)  with unit conversion at the boundary
_SCENARIO_KEYS = {
    "n_users": ("n_users", int),
    "cell_radius_km": ("cell_radius_km", float),
    "seed": ("seed", int),
    "noise_psd_dbm_hz": ("noise_psd_dbm_hz", float),
    "b_total_mhz": ("b_total_hz", lambda v: float(v) * 1e6),
    "p_total_dbm": ("p_total_dbm", float),
    "w1": ("w1", float),
    "w2": ("w2", float),
    "p_min_dbm": ("p_min_dbm", float),
    "s_max_mbytes": ("s_max_bits", lambda v: float(v) * 8e6),
    "f_server_ghz": ("f_server_hz", lambda v: float(v) * 1e9),
    "g_user_ghz": ("g_user_hz", lambda v: float(v) * 1e9),
    "d_data_mbytes": ("d_data_bits", lambda v: float(v) * 8e6),
    "c1_cycles": ("c1_cycles", float),
    "c2_exponent": ("c2_exponent", int),
    "c3_cycles": ("c3_cycles", float),
    "c4_exponent": ("c4_exponent", float),
    "c5_per_bit": ("c5_per_bit", float),
    "y2_cycles_per_bit": ("y2_cycles_per_bit", float),
    "shadow_std_db": ("shadow_std_db", float),
    "eve_ratio": ("eve_ratio", float),
}

_SOLVER_KEYS = {
    "eps0": ("eps0", float),
    "k_max": ("k_max", int),
    "j_max": ("j_max", int),
    "i_max": ("i_max", int),
    "bisect_tol": ("bisect_tol", float),
    "bisect_max_iter": ("bisect_max_iter", int),
}

KNOWN_KEYS = sorted(set(_SCENARIO_KEYS) | set(_SOLVER_KEYS))


def parse_config(document: dict) -> tuple[ScenarioSpec, SolverConfig]:
    """Validate a parsed JSON object and build the spec/config pair."""
    if not isinstance(document, dict):
        raise ConfigError("run configuration must be a JSON object")
    unknown = sorted(set(document) - set(_SCENARIO_KEYS) - set(_SOLVER_KEYS))
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}; "
                          f"known keys: {', '.join(KNOWN_KEYS)}")
    spec = ScenarioSpec()
    cfg = SolverConfig()
    for key, value in document.items():
        try:
            if key in _SCENARIO_KEYS:
                field, conv = _SCENARIO_KEYS[key]
                spec = replace(spec, **{field: conv(value)})
            else:
                field, conv = _SOLVER_KEYS[key]
                cfg = replace(cfg, **{field: conv(value)})
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for key {key!r}: {value!r} ({exc})") from exc
    return spec, cfg


def load_config(path) -> tuple[ScenarioSpec, SolverConfig]:
    try:
        with open(path) as fh:
            document = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: line {exc.lineno}: {exc.msg}") from exc
    return parse_config(document)
