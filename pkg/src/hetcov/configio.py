"""Strict JSON scenario files.

A scenario file holds a ``network`` section (required) plus optional
``sweep``, ``solve``, ``sim`` and ``allocation`` sections.  Parsing is
strict: unknown fields are rejected, and every diagnostic carries the JSON
path of the offending field (e.g. ``network.tiers[1].density``).

Schema (JSON types; defaults in parentheses):

    {
      "network": {
        "user_density":        number > 0,
        "bandwidth_hz":        number > 0,
        "path_loss_exponent":  number > 2,
        "tiers": [
          {
            "power_dbm":          number,
            "density":            number > 0,
            "rate_threshold_bps": number > 0,
            "bias":               number > 0   (1.0)
          }, ...
        ]
      },
      "sweep": {
        "variable":   "all_tiers" | "one_tier"   ("all_tiers"),
        "tier_index": int, required iff one_tier,
        "values_bps": strictly increasing positive numbers
                      (the distinct tier thresholds),
        "modes":      ["joint","equal_fractions","max_sir_spectrum_only",
                       "brute_force","joint_higher_load"]
                      (["joint","equal_fractions"])
      },
      "solve": {
        "tolerance":      number > 0    (1e-8),
        "max_iterations": int >= 1      (10000),
        "restarts":       int >= 0      (8),
        "grid_step":      number in (0, 0.5]  (0.01)
      },
      "sim": {
        "window_radius": number > 0 or null  (null = derived),
        "num_drops":     int >= 1            (10000),
        "seed":          int                 (0),
        "load_mode":     "analytic_average" | "actual_count"
                         ("analytic_average")
      },
      "allocation": { "assoc": [numbers], "spectrum": [numbers] }
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .network import AllocationPair, NetworkConfig, TierParams, network_digest
from .optimize import SolveOptions
from .simulate import SimConfig, SimLoadMode
from .sweep import SweepMode, SweepSpec

__all__ = ["ConfigError", "Scenario", "load_config", "loads_config", "network_digest"]


class ConfigError(ValueError):
    """Scenario file problem, carrying the JSON path of the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class Scenario:
    """Everything a scenario file describes.

    ``sim_given`` records whether the file had an explicit ``sim`` section
    (the sweep runner attaches Monte Carlo columns only then).
    """

    network: NetworkConfig
    sweep: SweepSpec
    solve: SolveOptions
    sim: SimConfig
    allocation: AllocationPair | None
    sim_given: bool


def _check_keys(obj: dict, path: str, required: tuple[str, ...], optional: tuple[str, ...]) -> None:
    if not isinstance(obj, dict):
        raise ConfigError(path, "expected an object")
    for key in obj:
        if key not in required and key not in optional:
            raise ConfigError(f"{path}.{key}", "unknown field")
    for key in required:
        if key not in obj:
            raise ConfigError(f"{path}.{key}", "missing required field")


def _number(obj: dict, path: str, key: str, default=None) -> float:
    if key not in obj:
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}.{key}", "expected a number")
    return float(v)


def _integer(obj: dict, path: str, key: str, default=None) -> int:
    if key not in obj:
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{path}.{key}", "expected an integer")
    return v


def _string(obj: dict, path: str, key: str, choices: tuple[str, ...], default=None) -> str:
    if key not in obj:
        return default
    v = obj[key]
    if not isinstance(v, str) or v not in choices:
        raise ConfigError(f"{path}.{key}", f"expected one of {list(choices)}")
    return v


def _positive(value: float, path: str) -> float:
    if not value > 0:
        raise ConfigError(path, "must be positive")
    return value


def _parse_tier(obj: dict, path: str) -> TierParams:
    _check_keys(obj, path, ("power_dbm", "density", "rate_threshold_bps"), ("bias",))
    power = _number(obj, path, "power_dbm")
    density = _positive(_number(obj, path, "density"), f"{path}.density")
    rate = _positive(_number(obj, path, "rate_threshold_bps"), f"{path}.rate_threshold_bps")
    bias = _number(obj, path, "bias", 1.0)
    _positive(bias, f"{path}.bias")
    try:
        return TierParams(power_dbm=power, density=density, rate_threshold=rate, bias=bias)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _parse_network(obj: dict, path: str) -> NetworkConfig:
    _check_keys(obj, path, ("user_density", "bandwidth_hz", "path_loss_exponent", "tiers"), ())
    user_density = _positive(_number(obj, path, "user_density"), f"{path}.user_density")
    bandwidth = _positive(_number(obj, path, "bandwidth_hz"), f"{path}.bandwidth_hz")
    alpha = _number(obj, path, "path_loss_exponent")
    if not alpha > 2:
        raise ConfigError(f"{path}.path_loss_exponent", "must exceed 2")
    tiers_obj = obj["tiers"]
    if not isinstance(tiers_obj, list) or not tiers_obj:
        raise ConfigError(f"{path}.tiers", "expected a nonempty array")
    tiers = tuple(_parse_tier(t, f"{path}.tiers[{i}]") for i, t in enumerate(tiers_obj))
    try:
        return NetworkConfig(
            tiers=tiers, user_density=user_density, bandwidth=bandwidth, path_loss_exponent=alpha
        )
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


_MODE_NAMES = tuple(m.value for m in SweepMode)


def _parse_sweep(obj: dict | None, path: str, network: NetworkConfig) -> SweepSpec:
    if obj is None:
        values = tuple(np.unique(network.rate_thresholds))
        return SweepSpec(values=values, modes=(SweepMode.JOINT, SweepMode.EQUAL_FRACTIONS))
    _check_keys(obj, path, (), ("variable", "tier_index", "values_bps", "modes"))
    variable = _string(obj, path, "variable", ("all_tiers", "one_tier"), "all_tiers")
    tier_index = _integer(obj, path, "tier_index", None)
    if variable == "one_tier":
        if tier_index is None:
            raise ConfigError(f"{path}.tier_index", "required when variable is one_tier")
        if not 0 <= tier_index < network.num_tiers:
            raise ConfigError(f"{path}.tier_index", "tier index out of range")
    elif tier_index is not None:
        raise ConfigError(f"{path}.tier_index", "only allowed when variable is one_tier")
    if "values_bps" in obj:
        raw = obj["values_bps"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError(f"{path}.values_bps", "expected a nonempty array")
        values = []
        for i, v in enumerate(raw):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"{path}.values_bps[{i}]", "expected a number")
            values.append(float(v))
        values = tuple(values)
    else:
        values = tuple(np.unique(network.rate_thresholds))
    if "modes" in obj:
        raw = obj["modes"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError(f"{path}.modes", "expected a nonempty array")
        modes = []
        for i, m in enumerate(raw):
            if not isinstance(m, str) or m not in _MODE_NAMES:
                raise ConfigError(f"{path}.modes[{i}]", f"expected one of {list(_MODE_NAMES)}")
            modes.append(SweepMode(m))
        modes = tuple(modes)
    else:
        modes = (SweepMode.JOINT, SweepMode.EQUAL_FRACTIONS)
    try:
        return SweepSpec(variable=variable, tier_index=tier_index, values=values, modes=modes)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _parse_solve(obj: dict | None, path: str) -> SolveOptions:
    if obj is None:
        return SolveOptions()
    _check_keys(obj, path, (), ("tolerance", "max_iterations", "restarts", "grid_step"))
    kwargs = {}
    if "tolerance" in obj:
        kwargs["tolerance"] = _number(obj, path, "tolerance")
    if "max_iterations" in obj:
        kwargs["max_iterations"] = _integer(obj, path, "max_iterations")
    if "restarts" in obj:
        kwargs["restarts"] = _integer(obj, path, "restarts")
    if "grid_step" in obj:
        kwargs["grid_step"] = _number(obj, path, "grid_step")
    try:
        return SolveOptions(**kwargs)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _parse_sim(obj: dict | None, path: str) -> SimConfig:
    if obj is None:
        return SimConfig()
    _check_keys(obj, path, (), ("window_radius", "num_drops", "seed", "load_mode"))
    kwargs = {}
    if "window_radius" in obj:
        if obj["window_radius"] is not None:
            kwargs["window_radius"] = _number(obj, path, "window_radius")
    if "num_drops" in obj:
        kwargs["num_drops"] = _integer(obj, path, "num_drops")
    if "seed" in obj:
        kwargs["seed"] = _integer(obj, path, "seed")
    mode = _string(obj, path, "load_mode", tuple(m.value for m in SimLoadMode), None)
    if mode is not None:
        kwargs["load_mode"] = SimLoadMode(mode)
    try:
        return SimConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _parse_allocation(obj: dict | None, path: str, network: NetworkConfig) -> AllocationPair | None:
    if obj is None:
        return None
    _check_keys(obj, path, ("assoc", "spectrum"), ())
    vectors = {}
    for key in ("assoc", "spectrum"):
        raw = obj[key]
        if not isinstance(raw, list) or len(raw) != network.num_tiers:
            raise ConfigError(f"{path}.{key}", "expected one number per tier")
        for i, v in enumerate(raw):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"{path}.{key}[{i}]", "expected a number")
        vectors[key] = [float(v) for v in raw]
    try:
        return AllocationPair(assoc=vectors["assoc"], spectrum=vectors["spectrum"])
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def loads_config(text: str, origin: str = "config") -> Scenario:
    """Parse a scenario from a JSON string; see module docstring for schema."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(origin, f"invalid JSON: {exc}") from exc
    _check_keys(doc, origin, ("network",), ("sweep", "solve", "sim", "allocation"))
    network = _parse_network(doc["network"], f"{origin}.network")
    sweep = _parse_sweep(doc.get("sweep"), f"{origin}.sweep", network)
    solve = _parse_solve(doc.get("solve"), f"{origin}.solve")
    sim = _parse_sim(doc.get("sim"), f"{origin}.sim")
    allocation = _parse_allocation(doc.get("allocation"), f"{origin}.allocation", network)
    return Scenario(
        network=network,
        sweep=sweep,
        solve=solve,
        sim=sim,
        allocation=allocation,
        sim_given="sim" in doc,
    )


def load_config(path) -> Scenario:
    """Load and strictly validate a scenario file."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(str(p), f"cannot read file: {exc}") from exc
    return loads_config(text, origin=p.name)
