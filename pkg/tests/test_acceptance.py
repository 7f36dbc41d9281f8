"""Acceptance gate: the full oracle battery at its contractual settings.

Each test runs one check from :mod:`hetcov.validation` at full strength and
prints a single [PASS]/[FAIL] line (bypassing capture so the line is always
visible in the run log), then asserts.  Timed checks also assert their
runtime budget.
"""

import pytest

from hetcov.validation import (
    check_coverage_integral,
    check_equal_fractions_gap,
    check_equal_fractions_stationarity,
    check_gradient_finite_difference,
    check_gradient_relation,
    check_grid_sandwich,
    check_kernel_closed_form,
    check_maxsir_gap,
    check_monte_carlo,
    check_offloading_monotonicity,
    check_output_determinism,
)

SEED = 20260815


def report(capsys, outcome, budget=None):
    with capsys.disabled():
        tag = "PASS" if outcome.passed else "FAIL"
        print(f"\n[{tag}] {outcome.name}: {outcome.detail} ({outcome.seconds:.2f}s)")
    assert outcome.passed, outcome.detail
    if budget is not None:
        assert outcome.seconds < budget, f"{outcome.name} took {outcome.seconds:.1f}s"


def test_penalty_kernel_closed_form_oracle(capsys):
    report(capsys, check_kernel_closed_form(samples=100), budget=1.0)


def test_gradients_against_finite_differences(capsys):
    report(capsys, check_gradient_finite_difference(points=1000, seed=SEED), budget=10.0)


def test_gradient_pair_relation_identity(capsys):
    report(capsys, check_gradient_relation(points=1000, seed=SEED))


def test_coverage_term_direct_quadrature(capsys):
    report(capsys, check_coverage_integral(configs=100, seed=SEED))


def test_equal_fractions_closed_form_stationarity(capsys):
    report(capsys, check_equal_fractions_stationarity())


def test_joint_optimum_lattice_sandwich(capsys):
    report(capsys, check_grid_sandwich(seed=SEED), budget=300.0)


def test_equal_fractions_near_joint_everywhere(capsys):
    report(capsys, check_equal_fractions_gap(seed=SEED))


def test_fixed_association_loses_measurably(capsys):
    report(capsys, check_maxsir_gap(seed=SEED))


def test_simulation_matches_analytic_model(capsys):
    report(
        capsys,
        check_monte_carlo(coverage_drops=20_000, assoc_drops=100_000, seed=SEED),
        budget=120.0,
    )


def test_offloading_drains_monotonically(capsys):
    report(capsys, check_offloading_monotonicity(seed=SEED))


def test_identical_seeds_identical_bytes(capsys):
    report(capsys, check_output_determinism(seed=SEED))
