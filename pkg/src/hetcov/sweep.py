"""Threshold sweeps over solver modes, with deterministic CSV/JSON output.

A sweep varies the per-user rate target (for every tier at once, or for one
tier with the rest fixed), solves each point in each requested mode, and
emits one row per (value, mode): the objective, both splits, the biases that
would realize the association split, a convergence flag, optional Monte
Carlo validation columns, and run identification (scenario hash, seed,
tolerance).

Column order is fixed:

    threshold,mode,objective,A_1..A_K,w_1..w_K,B_1..B_K,converged,
    mc_estimate,mc_stderr,config_hash,seed,tolerance

Floats are written with 10 significant digits; two runs with the same seeds
produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .network import (
    AllocationPair,
    LoadModel,
    NetworkConfig,
    biases_for_association,
    network_digest,
)
from .optimize import (
    SolveOptions,
    SolveResult,
    brute_force,
    optimize_equal_fractions,
    optimize_joint,
    optimize_spectrum_maxsir,
)
from .simulate import SimConfig, simulate_coverage

__all__ = [
    "SweepMode",
    "SweepSpec",
    "SweepRow",
    "run_sweep",
    "write_rows",
    "read_rows",
    "validate_rows",
]


class SweepMode(Enum):
    JOINT = "joint"
    EQUAL_FRACTIONS = "equal_fractions"
    MAX_SIR_SPECTRUM_ONLY = "max_sir_spectrum_only"
    BRUTE_FORCE = "brute_force"
    JOINT_HIGHER_LOAD = "joint_higher_load"


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep: the varied quantity, its values, and the solver modes.

    ``variable`` is ``"all_tiers"`` (every tier's rate target takes each
    value) or ``"one_tier"`` (only ``tier_index`` moves, the rest keep the
    scenario's values).  Values must be positive and strictly increasing.
    """

    values: tuple[float, ...]
    modes: tuple[SweepMode, ...]
    variable: str = "all_tiers"
    tier_index: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "modes", tuple(self.modes))
        if self.variable not in ("all_tiers", "one_tier"):
            raise ValueError("variable must be all_tiers or one_tier")
        if (self.tier_index is None) == (self.variable == "one_tier"):
            raise ValueError("tier_index is required exactly when variable is one_tier")
        if not self.values:
            raise ValueError("values must be nonempty")
        if any(not v > 0 for v in self.values):
            raise ValueError("values must be positive")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("values must be strictly increasing")
        if not self.modes:
            raise ValueError("modes must be nonempty")
        if any(not isinstance(m, SweepMode) for m in self.modes):
            raise ValueError("modes must be SweepMode values")


@dataclass(frozen=True)
class SweepRow:
    """One (threshold value, mode) result; field order matches the columns."""

    threshold: float
    mode: str
    objective: float
    assoc: tuple[float, ...]
    spectrum: tuple[float, ...]
    biases: tuple[float, ...]
    converged: bool
    mc_estimate: float | None
    mc_stderr: float | None
    config_hash: str
    seed: int
    tolerance: float


def _implied_biases(config: NetworkConfig, assoc: np.ndarray) -> np.ndarray:
    """Biases realizing an association split; tiers with zero share get 0.0.

    (The exact inversion requires positive targets; a zero-share tier is the
    bias -> 0 limit, emitted literally.)
    """
    assoc = np.asarray(assoc, dtype=float)
    positive = assoc > 0
    if positive.all():
        return biases_for_association(config, assoc)
    out = np.zeros(assoc.shape)
    half_alpha = config.path_loss_exponent / 2.0
    live = (assoc[positive] / config.densities[positive]) ** half_alpha / config.powers_watts[positive]
    out[positive] = live / live.min()
    return out


def _network_at(config: NetworkConfig, spec: SweepSpec, value: float) -> NetworkConfig:
    thresholds = config.rate_thresholds
    if spec.variable == "all_tiers":
        thresholds = np.full(config.num_tiers, value)
    else:
        thresholds = thresholds.copy()
        thresholds[spec.tier_index] = value
    return config.with_rate_thresholds(thresholds)


def _solve(config: NetworkConfig, mode: SweepMode, opts: SolveOptions, seed: int) -> SolveResult:
    if mode is SweepMode.JOINT:
        return optimize_joint(config, LoadModel.MEAN, opts, seed=seed)
    if mode is SweepMode.JOINT_HIGHER_LOAD:
        return optimize_joint(config, LoadModel.HIGHER, opts, seed=seed)
    if mode is SweepMode.EQUAL_FRACTIONS:
        return optimize_equal_fractions(config, LoadModel.MEAN)
    if mode is SweepMode.MAX_SIR_SPECTRUM_ONLY:
        return optimize_spectrum_maxsir(config, LoadModel.MEAN, opts, seed=seed)
    if mode is SweepMode.BRUTE_FORCE:
        return brute_force(config, LoadModel.MEAN, grid_step=opts.grid_step)
    raise ValueError(f"unknown sweep mode: {mode!r}")


def run_sweep(
    config: NetworkConfig,
    spec: SweepSpec,
    opts: SolveOptions | None = None,
    sim: SimConfig | None = None,
    seed: int = 0,
    threads: int = 1,
) -> list[SweepRow]:
    """Solve every (value, mode) pair; returns |values| x |modes| rows in order.

    Solver non-convergence is recorded in the row, never raised.  When
    ``sim`` is given, each row's allocation is Monte Carlo validated with
    the biases the row implies (zero-share tiers get a vanishing bias).
    """
    opts = opts or SolveOptions()
    rows: list[SweepRow] = []
    for value in spec.values:
        cfg = _network_at(config, spec, value)
        digest = network_digest(cfg)
        for mode in spec.modes:
            result = _solve(cfg, mode, opts, seed)
            assoc = np.asarray(result.alloc.assoc)
            biases = _implied_biases(cfg, assoc)
            mc_estimate = mc_stderr = None
            if sim is not None:
                sim_biases = np.where(biases > 0, biases, 1e-300)
                outcome = simulate_coverage(
                    cfg.with_biases(sim_biases), result.alloc, sim, threads=threads
                )
                mc_estimate = outcome.coverage_estimate
                mc_stderr = outcome.std_error
            rows.append(
                SweepRow(
                    threshold=value,
                    mode=mode.value,
                    objective=result.report.objective,
                    assoc=tuple(float(x) for x in result.alloc.assoc),
                    spectrum=tuple(float(x) for x in result.alloc.spectrum),
                    biases=tuple(float(x) for x in biases),
                    converged=result.converged,
                    mc_estimate=mc_estimate,
                    mc_stderr=mc_stderr,
                    config_hash=digest,
                    seed=seed,
                    tolerance=opts.tolerance,
                )
            )
    return rows


def _columns(num_tiers: int) -> list[str]:
    cols = ["threshold", "mode", "objective"]
    cols += [f"A_{k + 1}" for k in range(num_tiers)]
    cols += [f"w_{k + 1}" for k in range(num_tiers)]
    cols += [f"B_{k + 1}" for k in range(num_tiers)]
    cols += ["converged", "mc_estimate", "mc_stderr", "config_hash", "seed", "tolerance"]
    return cols


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def _row_cells(row: SweepRow) -> list:
    return (
        [row.threshold, row.mode, row.objective]
        + list(row.assoc)
        + list(row.spectrum)
        + list(row.biases)
        + [row.converged, row.mc_estimate, row.mc_stderr, row.config_hash, row.seed, row.tolerance]
    )


def write_rows(rows: list[SweepRow], path, fmt: str = "csv") -> None:
    """Write rows as CSV or JSON; both carry exactly the same fields."""
    if not rows:
        raise ValueError("no rows to write")
    num_tiers = len(rows[0].assoc)
    cols = _columns(num_tiers)
    p = Path(path)
    if fmt == "csv":
        lines = [",".join(cols)]
        for row in rows:
            lines.append(",".join(_fmt(c) for c in _row_cells(row)))
        p.write_text("\n".join(lines) + "\n")
    elif fmt == "json":
        payload = [dict(zip(cols, _row_cells(row))) for row in rows]
        p.write_text(json.dumps(payload, indent=2) + "\n")
    else:
        raise ValueError("format must be csv or json")


def read_rows(path) -> list[dict]:
    """Parse a file produced by :func:`write_rows` back into typed dicts."""
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("["):
        return json.loads(text)
    lines = [ln for ln in text.splitlines() if ln]
    header = lines[0].split(",")
    out = []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(header):
            raise ValueError("row width does not match header")
        rec: dict = {}
        for key, cell in zip(header, cells):
            if key == "mode" or key == "config_hash":
                rec[key] = cell
            elif key == "converged":
                rec[key] = cell == "true"
            elif key == "seed":
                rec[key] = int(cell)
            elif cell == "":
                rec[key] = None
            else:
                rec[key] = float(cell)
        out.append(rec)
    return out


def validate_rows(rows: list[dict]) -> None:
    """Structural validation of re-parsed sweep output; raises on problems."""
    if not rows:
        raise ValueError("no rows")
    known = {m.value for m in SweepMode}
    for i, rec in enumerate(rows):
        K = sum(1 for key in rec if key.startswith("A_"))
        if K < 1:
            raise ValueError(f"row {i}: no split columns")
        for prefix in ("A", "w"):
            vec = [rec[f"{prefix}_{k + 1}"] for k in range(K)]
            if any(v is None or v < -1e-9 or v > 1 + 1e-9 for v in vec):
                raise ValueError(f"row {i}: {prefix} entries outside [0, 1]")
            if abs(sum(vec) - 1.0) > 1e-8:
                raise ValueError(f"row {i}: {prefix} does not sum to 1")
        if rec["mode"] not in known:
            raise ValueError(f"row {i}: unknown mode {rec['mode']!r}")
        if not (rec["threshold"] > 0):
            raise ValueError(f"row {i}: nonpositive threshold")
        obj = rec["objective"]
        if obj is None or not (-1e-9 <= obj <= 1 + 1e-9):
            raise ValueError(f"row {i}: objective outside [0, 1]")
