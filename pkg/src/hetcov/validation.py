"""Oracle and invariant battery.

Each check returns a :class:`CheckOutcome` and is independent of the test
runner, so the same battery backs both the CLI ``validate`` subcommand and
the test suite.  Scenario-dependent checks default to the three-tier
reference scenario (also shipped as ``configs/threetier.json``).

The checks, in order: the closed-form kernel oracle, finite-difference
gradient oracles, the gradient relation identity, direct quadrature of the
per-tier coverage term, the closed-form equal-fractions stationarity, the
lattice-search sandwich around the joint optimizer, the equal-fractions and
spectrum-only comparisons, Monte Carlo agreement, offloading monotonicity,
and byte-determinism of sweep output.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .coverage import (
    grad_assoc,
    grad_spectrum,
    interference_penalty,
    per_tier_coverage_integral,
    rate_coverage,
    tier_coverage_term,
)
from .network import (
    AllocationPair,
    LoadModel,
    NetworkConfig,
    TierParams,
    association_probabilities,
    biases_for_association,
)
from .optimize import (
    SolveOptions,
    brute_force,
    optimize_equal_fractions,
    optimize_joint,
    optimize_spectrum_maxsir,
)
from .simulate import SimConfig, simulate_coverage
from .sweep import SweepMode, SweepSpec, run_sweep, write_rows

__all__ = [
    "CheckOutcome",
    "reference_threetier",
    "check_kernel_closed_form",
    "check_gradient_finite_difference",
    "check_gradient_relation",
    "check_coverage_integral",
    "check_equal_fractions_stationarity",
    "check_grid_sandwich",
    "check_equal_fractions_gap",
    "check_maxsir_gap",
    "check_monte_carlo",
    "check_offloading_monotonicity",
    "check_output_determinism",
    "run_all",
]

DEFAULT_SEED = 20260815

# Rate targets (bit/s) used by the scenario-level comparisons.
SWEEP_VALUES = (0.25e6, 0.5e6, 1.0e6, 2.0e6)


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    passed: bool
    detail: str
    seconds: float


def reference_threetier(rate_thresholds=(1e6, 1e6, 1e6)) -> NetworkConfig:
    """Three-tier reference scenario: macro/micro/pico layout.

    Tier powers {46, 30, 20} dBm, densities {0.01, 0.05, 0.2} of the user
    density 0.05, unit biases, path-loss exponent 3.5, 10 MHz of bandwidth.
    """
    user_density = 0.05
    densities = (5e-4, 2.5e-3, 1e-2)
    powers = (46.0, 30.0, 20.0)
    tiers = tuple(
        TierParams(power_dbm=p, density=d, rate_threshold=float(r))
        for p, d, r in zip(powers, densities, rate_thresholds)
    )
    return NetworkConfig(
        tiers=tiers, user_density=user_density, bandwidth=1e7, path_loss_exponent=3.5
    )


def _timed(name: str, passed: bool, detail: str, t0: float) -> CheckOutcome:
    return CheckOutcome(name=name, passed=bool(passed), detail=detail, seconds=time.perf_counter() - t0)


def _random_network(rng: np.random.Generator, num_tiers: int | None = None) -> NetworkConfig:
    """Random scenario in the regime of the reference one (no overflow caps)."""
    K = int(num_tiers if num_tiers is not None else rng.integers(2, 5))
    user_density = 0.05
    tiers = tuple(
        TierParams(
            power_dbm=float(rng.uniform(20.0, 46.0)),
            density=float(user_density * 10 ** rng.uniform(-1.5, -0.5)),
            rate_threshold=float(10 ** rng.uniform(5.3, 6.0)),
            bias=float(10 ** rng.uniform(-0.3, 0.6)),
        )
        for _ in range(K)
    )
    return NetworkConfig(
        tiers=tiers,
        user_density=user_density,
        bandwidth=1e7,
        path_loss_exponent=float(rng.uniform(2.6, 5.0)),
    )


def _random_interior_split(rng: np.random.Generator, K: int) -> np.ndarray:
    """Simplex point bounded away from the boundary (entries >= ~0.07)."""
    raw = rng.dirichlet(np.ones(K)) + 0.3
    return raw / raw.sum()


def check_kernel_closed_form(samples: int = 100) -> CheckOutcome:
    """Penalty kernel vs the elementary closed form at path-loss exponent 4."""
    t0 = time.perf_counter()
    taus = np.logspace(-6, 4, samples)
    worst = 0.0
    for tau in taus:
        expected = math.sqrt(tau) * math.atan(math.sqrt(tau))
        got = interference_penalty(float(tau), 4.0)
        worst = max(worst, abs(got - expected) / expected)
    passed = worst < 1e-8
    return _timed(
        "kernel closed form",
        passed,
        f"max rel err {worst:.2e} over {samples} thresholds in [1e-6, 1e4] (tol 1e-8)",
        t0,
    )


def _fd_term(config, assoc, spectrum, tier, model, coord, h):
    lo = assoc.copy() if coord == "assoc" else spectrum.copy()
    hi = lo.copy()
    lo[tier] -= h
    hi[tier] += h
    if coord == "assoc":
        f_lo = tier_coverage_term(config, lo, spectrum, tier, model)
        f_hi = tier_coverage_term(config, hi, spectrum, tier, model)
    else:
        f_lo = tier_coverage_term(config, assoc, lo, tier, model)
        f_hi = tier_coverage_term(config, assoc, hi, tier, model)
    return (f_hi - f_lo) / (2.0 * h)


def check_gradient_finite_difference(
    points: int = 1000, seed: int = DEFAULT_SEED, model: LoadModel = LoadModel.MEAN
) -> CheckOutcome:
    """Analytic gradients vs central finite differences at random interior points."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        config = _random_network(rng)
        K = config.num_tiers
        assoc = _random_interior_split(rng, K)
        spectrum = _random_interior_split(rng, K)
        alloc = AllocationPair(assoc, spectrum)
        ga = grad_assoc(config, alloc, model)
        gw = grad_spectrum(config, alloc, model)
        scale = max(np.max(np.abs(ga)), np.max(np.abs(gw)), 1e-8)
        for k in range(K):
            fd_a = _fd_term(config, assoc, spectrum, k, model, "assoc", 1e-6)
            fd_w = _fd_term(config, assoc, spectrum, k, model, "spectrum", 1e-6 * spectrum[k])
            rel_a = abs(ga[k] - fd_a) / max(abs(ga[k]), 1e-3 * scale)
            rel_w = abs(gw[k] - fd_w) / max(abs(gw[k]), 1e-3 * scale)
            worst = max(worst, rel_a, rel_w)
    passed = worst < 1e-5
    return _timed(
        "gradient finite differences",
        passed,
        f"max rel err {worst:.2e} at {points} interior points, {model.value} load (tol 1e-5)",
        t0,
    )


def check_gradient_relation(points: int = 1000, seed: int = DEFAULT_SEED) -> CheckOutcome:
    """Identity linking the two gradients under the MEAN load model."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        config = _random_network(rng)
        K = config.num_tiers
        alloc = AllocationPair(_random_interior_split(rng, K), _random_interior_split(rng, K))
        report = rate_coverage(config, alloc, LoadModel.MEAN)
        ga = report.grad_assoc
        gw = report.grad_spectrum
        alpha = config.path_loss_exponent
        for k in range(K):
            pen = interference_penalty(float(report.sir_thresholds[k]), alpha)
            direct = 1.0 / (1.0 + alloc.assoc[k] * pen) ** 2 - (
                alloc.spectrum[k] / alloc.assoc[k]
            ) * gw[k]
            worst = max(worst, abs(ga[k] - direct))
    passed = worst < 1e-12
    return _timed(
        "gradient relation identity",
        passed,
        f"max residual {worst:.2e} at {points} interior points (tol 1e-12)",
        t0,
    )


def check_coverage_integral(configs: int = 100, seed: int = DEFAULT_SEED) -> CheckOutcome:
    """Direct quadrature of each tier's term vs the closed form."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(configs):
        config = _random_network(rng)
        K = config.num_tiers
        assoc = association_probabilities(config)
        alloc = AllocationPair(assoc, _random_interior_split(rng, K))
        alpha = config.path_loss_exponent
        report = rate_coverage(config, alloc, LoadModel.MEAN)
        for k in range(K):
            got = per_tier_coverage_integral(config, alloc, LoadModel.MEAN, k)
            pen = interference_penalty(float(report.sir_thresholds[k]), alpha)
            expected = 1.0 / (1.0 / assoc[k] + pen)
            worst = max(worst, abs(got - expected) / expected)
    passed = worst < 1e-8
    return _timed(
        "coverage-term quadrature",
        passed,
        f"max rel err {worst:.2e} over {configs} random scenarios (tol 1e-8)",
        t0,
    )


def check_equal_fractions_stationarity(config: NetworkConfig | None = None) -> CheckOutcome:
    """Closed-form equal-fractions point satisfies its stationarity system."""
    t0 = time.perf_counter()
    config = config or reference_threetier()
    result = optimize_equal_fractions(config)
    A = result.alloc.assoc
    alpha = config.path_loss_exponent
    taus = result.report.sir_thresholds
    marginals = np.array(
        [1.0 / (1.0 + A[k] * interference_penalty(float(taus[k]), alpha)) ** 2 for k in range(config.num_tiers)]
    )
    residual = float(np.max(np.abs(marginals - marginals.mean())))
    sum_err = abs(float(A.sum()) - 1.0)
    passed = residual < 1e-10 and sum_err <= 1e-12
    return _timed(
        "equal-fractions stationarity",
        passed,
        f"stationarity residual {residual:.2e} (tol 1e-10), simplex error {sum_err:.2e} (tol 1e-12)",
        t0,
    )


def check_grid_sandwich(
    config: NetworkConfig | None = None,
    values: tuple[float, ...] = SWEEP_VALUES,
    seed: int = DEFAULT_SEED,
) -> CheckOutcome:
    """Joint optimizer sandwiched by coarse/fine lattice searches."""
    t0 = time.perf_counter()
    config = config or reference_threetier()
    opts = SolveOptions()
    details = []
    passed = True
    for value in values:
        cfg = config.with_rate_thresholds(np.full(config.num_tiers, value))
        joint = optimize_joint(cfg, LoadModel.MEAN, opts, seed=seed).report.objective
        coarse = brute_force(cfg, LoadModel.MEAN, grid_step=0.01).report.objective
        fine = brute_force(cfg, LoadModel.MEAN, grid_step=0.005).report.objective
        ok = joint >= coarse - 1e-6 and joint <= fine + 1e-3
        passed &= ok
        details.append(f"R={value / 1e6:g}M: joint {joint:.6f} in [{coarse:.6f}-1e-6, {fine:.6f}+1e-3]")
    return _timed("lattice sandwich", passed, "; ".join(details), t0)


def check_equal_fractions_gap(
    config: NetworkConfig | None = None,
    values: tuple[float, ...] = SWEEP_VALUES,
    seed: int = DEFAULT_SEED,
) -> CheckOutcome:
    """Equal fractions stays within 0.01 of the joint optimum."""
    t0 = time.perf_counter()
    config = config or reference_threetier()
    opts = SolveOptions()
    worst = 0.0
    for value in values:
        cfg = config.with_rate_thresholds(np.full(config.num_tiers, value))
        joint = optimize_joint(cfg, LoadModel.MEAN, opts, seed=seed).report.objective
        ef = optimize_equal_fractions(cfg).report.objective
        worst = max(worst, abs(joint - ef))
    passed = worst <= 0.01
    return _timed(
        "equal-fractions gap",
        passed,
        f"max |joint - equal_fractions| = {worst:.5f} over {len(values)} thresholds (tol 0.01)",
        t0,
    )


def check_maxsir_gap(
    config: NetworkConfig | None = None,
    values: tuple[float, ...] = SWEEP_VALUES,
    seed: int = DEFAULT_SEED,
) -> CheckOutcome:
    """Spectrum-only under strongest-power association loses everywhere,
    and by more than 0.02 somewhere."""
    t0 = time.perf_counter()
    config = config or reference_threetier()
    opts = SolveOptions()
    gaps = []
    below = True
    for value in values:
        cfg = config.with_rate_thresholds(np.full(config.num_tiers, value))
        joint = optimize_joint(cfg, LoadModel.MEAN, opts, seed=seed).report.objective
        fixed = optimize_spectrum_maxsir(cfg, LoadModel.MEAN, opts, seed=seed).report.objective
        gaps.append(joint - fixed)
        below &= fixed < joint
    passed = below and max(gaps) > 0.02
    return _timed(
        "strongest-power association gap",
        passed,
        f"gaps {['%.4f' % g for g in gaps]}; all positive: {below}, max {max(gaps):.4f} (> 0.02)",
        t0,
    )


def check_monte_carlo(
    config: NetworkConfig | None = None,
    coverage_drops: int = 20_000,
    assoc_drops: int = 100_000,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
) -> CheckOutcome:
    """Simulation agrees with the analytic model: coverage at the
    equal-fractions allocation, and association frequencies at unit biases."""
    t0 = time.perf_counter()
    config = config or reference_threetier()

    ef = optimize_equal_fractions(config)
    biases = biases_for_association(config, ef.alloc.assoc)
    cfg_mc = config.with_biases(biases)
    outcome = simulate_coverage(
        cfg_mc, ef.alloc, SimConfig(num_drops=coverage_drops, seed=seed), threads=threads
    )
    analytic = ef.report.objective
    cov_err = abs(outcome.coverage_estimate - analytic)
    cov_tol = max(0.02, 3.0 * outcome.std_error)
    cov_ok = cov_err < cov_tol

    probe = simulate_coverage(
        config,
        ef.alloc,
        SimConfig(num_drops=assoc_drops, seed=seed + 1),
        threads=threads,
    )
    expected = association_probabilities(config)
    sigma = np.sqrt(expected * (1.0 - expected) / assoc_drops)
    assoc_err = np.abs(probe.per_tier_assoc_empirical - expected)
    assoc_ok = bool(np.all(assoc_err <= 3.0 * sigma))

    passed = cov_ok and assoc_ok
    return _timed(
        "monte carlo agreement",
        passed,
        f"coverage |{outcome.coverage_estimate:.4f} - {analytic:.4f}| = {cov_err:.4f} "
        f"(tol {cov_tol:.4f}, {coverage_drops} drops); association max deviation "
        f"{np.max(assoc_err / sigma):.2f} sigma (tol 3, {assoc_drops} drops)",
        t0,
    )


def check_offloading_monotonicity(
    config: NetworkConfig | None = None,
    tier: int = 1,
    values: tuple[float, ...] = (0.25e6, 0.5e6, 1.0e6, 2.0e6, 4.0e6),
    seed: int = DEFAULT_SEED,
) -> CheckOutcome:
    """Raising one tier's rate target drains both its users and its spectrum."""
    t0 = time.perf_counter()
    config = config or reference_threetier()
    opts = SolveOptions()
    assoc_path = []
    spectrum_path = []
    for value in values:
        thresholds = config.rate_thresholds
        thresholds[tier] = value
        cfg = config.with_rate_thresholds(thresholds)
        result = optimize_joint(cfg, LoadModel.MEAN, opts, seed=seed)
        assoc_path.append(float(result.alloc.assoc[tier]))
        spectrum_path.append(float(result.alloc.spectrum[tier]))
    slack = 1e-6
    mono_a = all(b <= a + slack for a, b in zip(assoc_path, assoc_path[1:]))
    mono_w = all(b <= a + slack for a, b in zip(spectrum_path, spectrum_path[1:]))
    passed = mono_a and mono_w
    return _timed(
        "offloading monotonicity",
        passed,
        f"tier {tier + 1} assoc {['%.4f' % a for a in assoc_path]}, "
        f"spectrum {['%.4f' % w for w in spectrum_path]} (nonincreasing within {slack:g})",
        t0,
    )


def check_output_determinism(
    config: NetworkConfig | None = None,
    tmp_dir=None,
    seed: int = DEFAULT_SEED,
    threads: int = 2,
) -> CheckOutcome:
    """Identical seeds must produce byte-identical output files."""
    import tempfile
    from pathlib import Path

    t0 = time.perf_counter()
    config = config or reference_threetier()
    spec = SweepSpec(values=(0.5e6, 1.0e6), modes=(SweepMode.JOINT, SweepMode.EQUAL_FRACTIONS))
    sim = SimConfig(num_drops=2000, seed=seed)
    with tempfile.TemporaryDirectory(dir=tmp_dir) as td:
        paths = [Path(td) / name for name in ("a.csv", "b.csv", "c.csv")]
        rows_a = run_sweep(config, spec, sim=sim, seed=seed, threads=1)
        rows_b = run_sweep(config, spec, sim=sim, seed=seed, threads=threads)
        write_rows(rows_a, paths[0], "csv")
        write_rows(rows_b, paths[1], "csv")
        write_rows(run_sweep(config, spec, sim=sim, seed=seed, threads=1), paths[2], "csv")
        blobs = [p.read_bytes() for p in paths]
    passed = blobs[0] == blobs[1] == blobs[2]
    return _timed(
        "output determinism",
        passed,
        f"three runs (threads 1/{threads}/1), identical bytes: {passed}",
        t0,
    )


def run_all(
    config: NetworkConfig | None = None,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
) -> list[CheckOutcome]:
    """Run the full battery in order; scenario checks use ``config`` if given."""
    return [
        check_kernel_closed_form(),
        check_gradient_finite_difference(seed=seed),
        check_gradient_relation(seed=seed),
        check_coverage_integral(seed=seed),
        check_equal_fractions_stationarity(config),
        check_grid_sandwich(config, seed=seed),
        check_equal_fractions_gap(config, seed=seed),
        check_maxsir_gap(config, seed=seed),
        check_monte_carlo(config, seed=seed, threads=threads),
        check_offloading_monotonicity(config, seed=seed),
        check_output_determinism(config, seed=seed),
    ]
