import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hetcov import (
    AllocationPair,
    LoadModel,
    NetworkConfig,
    SolveMode,
    SolveOptions,
    TierParams,
    brute_force,
    interference_penalty,
    kkt_residual,
    optimize_equal_fractions,
    optimize_joint,
    optimize_spectrum_maxsir,
    project_simplex,
    rate_coverage,
)


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.floats(min_value=-50.0, max_value=50.0, allow_nan=False), min_size=1, max_size=8)
)
def test_project_simplex_properties(values):
    v = np.array(values)
    p = project_simplex(v)
    assert p.shape == v.shape
    assert np.all(p >= 0.0)
    assert p.sum() == pytest.approx(1.0, abs=1e-9)
    # projection preserves coordinate order
    order = np.argsort(v, kind="stable")
    assert np.all(np.diff(p[order]) >= -1e-12)
    # points already on the simplex are fixed
    if np.all(v >= 0) and abs(v.sum() - 1.0) < 1e-12:
        assert np.allclose(p, v, atol=1e-9)


def test_project_simplex_known_values():
    assert np.allclose(project_simplex(np.array([0.5, 0.5])), [0.5, 0.5])
    assert np.allclose(project_simplex(np.array([2.0, 0.0])), [1.0, 0.0])
    assert np.allclose(project_simplex(np.array([0.4, 0.2])), [0.6, 0.4])


def test_equal_fractions_closed_form(threetier):
    result = optimize_equal_fractions(threetier)
    alpha = threetier.path_loss_exponent
    weights = []
    for k in range(3):
        exponent = (
            threetier.rate_thresholds[k]
            * threetier.user_density
            / (threetier.bandwidth * threetier.densities[k])
        )
        tau_bar = 2.0**exponent - 1.0
        weights.append(1.0 / interference_penalty(tau_bar, alpha))
    expected = np.array(weights) / np.sum(weights)
    assert np.allclose(result.alloc.assoc, expected, atol=1e-14)
    assert np.allclose(result.alloc.spectrum, expected, atol=1e-14)
    assert result.converged
    assert result.mode is SolveMode.EQUAL_FRACTIONS
    assert not result.degenerate


def test_equal_fractions_rejects_higher_load(threetier):
    with pytest.raises(ValueError):
        optimize_equal_fractions(threetier, LoadModel.HIGHER)


def test_joint_beats_equal_fractions(threetier):
    ef = optimize_equal_fractions(threetier)
    joint = optimize_joint(threetier, seed=0)
    assert joint.converged
    assert joint.report.objective >= ef.report.objective - 1e-12
    assert kkt_residual(threetier, joint.alloc) < 1e-6


def test_joint_seed_determinism(threetier, fast_opts):
    r1 = optimize_joint(threetier, opts=fast_opts, seed=3)
    r2 = optimize_joint(threetier, opts=fast_opts, seed=3)
    assert np.array_equal(r1.alloc.assoc, r2.alloc.assoc)
    assert np.array_equal(r1.alloc.spectrum, r2.alloc.spectrum)
    assert r1.report.objective == r2.report.objective


def test_joint_higher_load_below_mean(threetier, fast_opts):
    higher = optimize_joint(threetier, LoadModel.HIGHER, fast_opts, seed=0)
    mean = optimize_joint(threetier, LoadModel.MEAN, fast_opts, seed=0)
    assert higher.report.objective < mean.report.objective
    assert higher.converged


def test_maxsir_requires_equal_biases(threetier):
    biased = threetier.with_biases(np.array([1.0, 2.0, 4.0]))
    with pytest.raises(ValueError):
        optimize_spectrum_maxsir(biased)


def test_maxsir_association_is_fixed(threetier, fast_opts):
    from hetcov import association_probabilities

    result = optimize_spectrum_maxsir(threetier, opts=fast_opts, seed=0)
    assert np.allclose(result.alloc.assoc, association_probabilities(threetier), atol=1e-15)
    assert result.mode is SolveMode.MAX_SIR_SPECTRUM_ONLY


def brute_force_reference(config, grid_step):
    """Literal nested-loop lattice scan, first lexicographic winner kept."""
    M = round(1.0 / grid_step)
    K = config.num_tiers
    lattice = [
        p for p in itertools.product(range(M + 1), repeat=K) if sum(p) == M
    ]  # ascending lexicographic by construction
    best_val = -1.0
    best = None
    for a_pt in lattice:
        A = np.array(a_pt) / M
        for w_pt in lattice:
            w = np.array(w_pt) / M
            total = 0.0
            for k in range(K):
                if A[k] == 0.0:
                    continue
                demand = (
                    config.rate_thresholds[k]
                    * config.user_density
                    * A[k]
                    / (config.bandwidth * config.densities[k])
                )
                exponent = demand / w[k] if w[k] > 0 else math.inf
                if exponent > 1000.0:
                    continue
                tau = 2.0**exponent - 1.0
                pen = interference_penalty(tau, config.path_loss_exponent) if tau > 0 else 0.0
                total += A[k] / (1.0 + A[k] * pen)
            if total > best_val:
                best_val = total
                best = (a_pt, w_pt)
    return best_val, best


@pytest.mark.parametrize("grid_step", [0.25, 0.2])
def test_brute_force_matches_nested_loop(twotier, grid_step):
    result = brute_force(twotier, grid_step=grid_step)
    expected_val, expected_pt = brute_force_reference(twotier, grid_step)
    assert result.report.objective == pytest.approx(expected_val, abs=1e-12)
    M = round(1.0 / grid_step)
    assert tuple(np.round(result.alloc.assoc * M).astype(int)) == expected_pt[0]
    assert tuple(np.round(result.alloc.spectrum * M).astype(int)) == expected_pt[1]


def test_brute_force_three_tier_coarse(threetier):
    result = brute_force(threetier, grid_step=0.2)
    expected_val, expected_pt = brute_force_reference(threetier, 0.2)
    assert result.report.objective == pytest.approx(expected_val, abs=1e-12)
    assert tuple(np.round(np.array(result.alloc.assoc) * 5).astype(int)) == expected_pt[0]


def test_brute_force_guards(threetier):
    with pytest.raises(ValueError):
        brute_force(threetier, grid_step=0.3)  # does not divide 1
    with pytest.raises(ValueError):
        brute_force(threetier, grid_step=0.0002)  # lattice too large
    five = NetworkConfig(
        tiers=tuple(
            TierParams(power_dbm=30.0, density=1e-3 * (k + 1), rate_threshold=1e6)
            for k in range(5)
        ),
        user_density=0.05,
        bandwidth=1e7,
        path_loss_exponent=3.5,
    )
    with pytest.raises(ValueError):
        brute_force(five, grid_step=0.25)


def test_brute_force_bounds_joint(threetier, fast_opts):
    joint = optimize_joint(threetier, opts=fast_opts, seed=0)
    coarse = brute_force(threetier, grid_step=0.05)
    assert joint.report.objective >= coarse.report.objective - 1e-9


def test_solve_options_validation():
    with pytest.raises(ValueError):
        SolveOptions(tolerance=0.0)
    with pytest.raises(ValueError):
        SolveOptions(grid_step=0.6)
    with pytest.raises(ValueError):
        SolveOptions(max_iterations=0)


def test_joint_two_tier_interior(twotier):
    result = optimize_joint(twotier, seed=1)
    assert result.converged
    assert np.all(result.alloc.assoc > 0)
    assert np.all(result.alloc.spectrum > 0)
    report = rate_coverage(twotier, result.alloc)
    assert report.objective == pytest.approx(result.report.objective, rel=1e-14)


def test_allocation_sums(threetier, fast_opts):
    for result in (
        optimize_joint(threetier, opts=fast_opts, seed=0),
        optimize_equal_fractions(threetier),
        optimize_spectrum_maxsir(threetier, opts=fast_opts, seed=0),
        brute_force(threetier, grid_step=0.1),
    ):
        assert float(np.sum(result.alloc.assoc)) == pytest.approx(1.0, abs=1e-12)
        assert float(np.sum(result.alloc.spectrum)) == pytest.approx(1.0, abs=1e-12)
