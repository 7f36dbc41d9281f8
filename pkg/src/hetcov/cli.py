"""Command-line front end.

Subcommands::

    hetcov optimize --config cfg.json [--mode joint] [--out rows.csv]
    hetcov sweep    --config cfg.json --out rows.csv [--format json]
    hetcov simulate --config cfg.json [--out summary.json]
    hetcov validate [--config cfg.json]

Exit codes: 0 on success, 1 on configuration or validation failure, 2 when
``optimize`` finishes without converging (sweeps record non-convergence in
the output instead).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .configio import ConfigError, Scenario, load_config
from .network import LoadModel, biases_for_association
from .optimize import SolveOptions, optimize_equal_fractions
from .simulate import simulate_coverage
from .sweep import SweepMode, SweepRow, _implied_biases, _solve, run_sweep, write_rows
from .validation import reference_threetier, run_all

__all__ = ["main"]

_MODES = tuple(m.value for m in SweepMode)


def _add_common(parser: argparse.ArgumentParser, config_required: bool = True) -> None:
    parser.add_argument("--config", required=config_required, help="scenario JSON file")
    parser.add_argument("--seed", type=int, default=None, help="override the run seed")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hetcov", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_opt = sub.add_parser("optimize", help="solve one scenario at its configured rate targets")
    _add_common(p_opt)
    p_opt.add_argument("--mode", choices=_MODES, default=SweepMode.JOINT.value)
    p_opt.add_argument("--grid-step", type=float, default=None, help="lattice pitch for brute_force")
    p_opt.add_argument("--out", default=None, help="also write the result as a one-row table")
    p_opt.add_argument("--format", choices=("csv", "json"), default="csv")

    p_sweep = sub.add_parser("sweep", help="solve across the configured rate-target values")
    _add_common(p_sweep)
    p_sweep.add_argument("--mode", choices=_MODES, default=None, help="replace the configured mode list")
    p_sweep.add_argument("--grid-step", type=float, default=None)
    p_sweep.add_argument("--threads", type=int, default=1)
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")

    p_sim = sub.add_parser("simulate", help="Monte Carlo check of one allocation")
    _add_common(p_sim)
    p_sim.add_argument("--threads", type=int, default=1)
    p_sim.add_argument("--out", default=None)
    p_sim.add_argument("--format", choices=("csv", "json"), default="json")

    p_val = sub.add_parser("validate", help="run the oracle and invariant battery")
    _add_common(p_val, config_required=False)
    p_val.add_argument("--threads", type=int, default=1)
    return parser


def _solve_options(scenario: Scenario, grid_step: float | None) -> SolveOptions:
    opts = scenario.solve
    if grid_step is None:
        return opts
    return SolveOptions(
        tolerance=opts.tolerance,
        max_iterations=opts.max_iterations,
        restarts=opts.restarts,
        grid_step=grid_step,
    )


def _common_threshold(config) -> float | None:
    thresholds = config.rate_thresholds
    if np.all(thresholds == thresholds[0]):
        return float(thresholds[0])
    return None


def _cmd_optimize(args) -> int:
    scenario = load_config(args.config)
    config = scenario.network
    opts = _solve_options(scenario, args.grid_step)
    seed = args.seed if args.seed is not None else 0
    mode = SweepMode(args.mode)
    result = _solve(config, mode, opts, seed)

    biases = _implied_biases(config, np.asarray(result.alloc.assoc))
    print(f"mode: {mode.value}")
    print(f"objective: {result.report.objective:.10g}")
    print(f"converged: {'yes' if result.converged else 'NO'} ({result.iterations} iterations)")
    print("tier  assoc         spectrum      bias")
    for k in range(config.num_tiers):
        print(
            f"{k + 1:<5d} {result.alloc.assoc[k]:<13.6g} "
            f"{result.alloc.spectrum[k]:<13.6g} {biases[k]:.6g}"
        )

    if args.out is not None:
        from .configio import network_digest

        row = SweepRow(
            threshold=_common_threshold(config),
            mode=mode.value,
            objective=result.report.objective,
            assoc=tuple(float(x) for x in result.alloc.assoc),
            spectrum=tuple(float(x) for x in result.alloc.spectrum),
            biases=tuple(float(x) for x in biases),
            converged=result.converged,
            mc_estimate=None,
            mc_stderr=None,
            config_hash=network_digest(config),
            seed=seed,
            tolerance=opts.tolerance,
        )
        write_rows([row], args.out, args.format)
        print(f"wrote {args.out}")
    return 0 if result.converged else 2


def _cmd_sweep(args) -> int:
    scenario = load_config(args.config)
    spec = scenario.sweep
    if args.mode is not None:
        spec = dataclasses.replace(spec, modes=(SweepMode(args.mode),))
    opts = _solve_options(scenario, args.grid_step)
    seed = args.seed if args.seed is not None else scenario.sim.seed
    sim = scenario.sim if scenario.sim_given else None
    rows = run_sweep(scenario.network, spec, opts=opts, sim=sim, seed=seed, threads=args.threads)
    write_rows(rows, args.out, args.format)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    scenario = load_config(args.config)
    config = scenario.network
    if scenario.allocation is not None:
        alloc = scenario.allocation
    else:
        ef = optimize_equal_fractions(config, LoadModel.MEAN)
        alloc = ef.alloc
        config = config.with_biases(biases_for_association(config, alloc.assoc))
    sim = scenario.sim
    if args.seed is not None:
        sim = dataclasses.replace(sim, seed=args.seed)
    outcome = simulate_coverage(config, alloc, sim, threads=args.threads)
    print(f"coverage: {outcome.coverage_estimate:.6f} +/- {outcome.std_error:.6f} (1 s.e.)")
    print(f"drops: {outcome.drops}  seed: {outcome.seed}  window radius: {outcome.window_radius:.4g}")
    print("tier  assoc(empirical)  coverage(empirical)")
    for k in range(config.num_tiers):
        print(
            f"{k + 1:<5d} {outcome.per_tier_assoc_empirical[k]:<17.6g} "
            f"{outcome.per_tier_coverage[k]:.6g}"
        )
    if args.out is not None:
        payload = {
            "coverage_estimate": outcome.coverage_estimate,
            "std_error": outcome.std_error,
            "drops": outcome.drops,
            "seed": outcome.seed,
            "window_radius": outcome.window_radius,
            "per_tier_assoc_empirical": [float(x) for x in outcome.per_tier_assoc_empirical],
            "per_tier_coverage": [float(x) for x in outcome.per_tier_coverage],
        }
        path = Path(args.out)
        if args.format == "json":
            path.write_text(json.dumps(payload, indent=2) + "\n")
        else:
            flat = {
                "coverage_estimate": payload["coverage_estimate"],
                "std_error": payload["std_error"],
                "drops": payload["drops"],
                "seed": payload["seed"],
                "window_radius": payload["window_radius"],
            }
            for k in range(config.num_tiers):
                flat[f"assoc_{k + 1}"] = payload["per_tier_assoc_empirical"][k]
            for k in range(config.num_tiers):
                flat[f"coverage_{k + 1}"] = payload["per_tier_coverage"][k]
            header = ",".join(flat)
            cells = ",".join(f"{v:.10g}" if isinstance(v, float) else str(v) for v in flat.values())
            path.write_text(header + "\n" + cells + "\n")
        print(f"wrote {args.out}")
    return 0


def _cmd_validate(args) -> int:
    if args.config is not None:
        scenario = load_config(args.config)
        config = scenario.network
    else:
        config = reference_threetier()
    seed = args.seed if args.seed is not None else 20260815
    outcomes = run_all(config, seed=seed, threads=args.threads)
    failed = 0
    for oc in outcomes:
        tag = "PASS" if oc.passed else "FAIL"
        failed += not oc.passed
        print(f"[{tag}] {oc.name}: {oc.detail} ({oc.seconds:.2f}s)")
    print(f"{len(outcomes) - failed}/{len(outcomes)} checks passed")
    return 1 if failed else 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {
        "optimize": _cmd_optimize,
        "sweep": _cmd_sweep,
        "simulate": _cmd_simulate,
        "validate": _cmd_validate,
    }[args.command]
    try:
        return handler(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
