"""Spectrum and user allocation for multi-tier random cellular networks.

Analytic rate-coverage model for K independent Poisson tiers sharing users
under biased strongest-signal association, with per-tier spectrum carving,
solvers for the joint allocation problem, and a Monte Carlo cross-check.
"""

from .configio import ConfigError, Scenario, load_config, loads_config
from .coverage import (
    EXP_CAP,
    CoverageReport,
    SirSample,
    grad_assoc,
    grad_spectrum,
    interference_penalty,
    interference_penalty_deriv,
    kkt_residual,
    per_tier_coverage_integral,
    rate_coverage,
    sir_threshold,
    tier_coverage_term,
)
from .network import (
    AllocationPair,
    LoadModel,
    NetworkConfig,
    TierParams,
    association_probabilities,
    biases_for_association,
    mean_load,
    network_digest,
)
from .optimize import (
    SolveMode,
    SolveOptions,
    SolveResult,
    brute_force,
    optimize_equal_fractions,
    optimize_joint,
    optimize_spectrum_maxsir,
    project_simplex,
)
from .simulate import (
    SimConfig,
    SimLoadMode,
    SimOutcome,
    analytic_distance_cdf,
    default_window_radius,
    simulate_assoc_distance,
    simulate_coverage,
)
from .sweep import (
    SweepMode,
    SweepRow,
    SweepSpec,
    read_rows,
    run_sweep,
    validate_rows,
    write_rows,
)
from .validation import CheckOutcome, reference_threetier, run_all

__version__ = "0.1.0"

__all__ = [
    "AllocationPair",
    "CheckOutcome",
    "ConfigError",
    "CoverageReport",
    "EXP_CAP",
    "LoadModel",
    "NetworkConfig",
    "Scenario",
    "SimConfig",
    "SimLoadMode",
    "SimOutcome",
    "SirSample",
    "SolveMode",
    "SolveOptions",
    "SolveResult",
    "SweepMode",
    "SweepRow",
    "SweepSpec",
    "TierParams",
    "analytic_distance_cdf",
    "association_probabilities",
    "biases_for_association",
    "brute_force",
    "default_window_radius",
    "grad_assoc",
    "grad_spectrum",
    "interference_penalty",
    "interference_penalty_deriv",
    "kkt_residual",
    "load_config",
    "loads_config",
    "mean_load",
    "network_digest",
    "optimize_equal_fractions",
    "optimize_joint",
    "optimize_spectrum_maxsir",
    "per_tier_coverage_integral",
    "project_simplex",
    "rate_coverage",
    "read_rows",
    "reference_threetier",
    "run_all",
    "run_sweep",
    "sir_threshold",
    "simulate_assoc_distance",
    "simulate_coverage",
    "tier_coverage_term",
    "validate_rows",
    "write_rows",
    "__version__",
]
