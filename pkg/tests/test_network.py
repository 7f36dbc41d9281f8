import math

import numpy as np
import pytest

from hetcov import (
    AllocationPair,
    LoadModel,
    NetworkConfig,
    TierParams,
    association_probabilities,
    biases_for_association,
    mean_load,
    network_digest,
)
from hetcov.network import dbm_to_watts


def test_dbm_to_watts():
    assert dbm_to_watts(0.0) == pytest.approx(1e-3)
    assert dbm_to_watts(30.0) == pytest.approx(1.0)
    assert dbm_to_watts(46.0) == pytest.approx(10 ** 1.6)


def test_tier_params_validation():
    with pytest.raises(ValueError):
        TierParams(power_dbm=30.0, density=0.0, rate_threshold=1e6)
    with pytest.raises(ValueError):
        TierParams(power_dbm=30.0, density=1e-3, rate_threshold=-1.0)
    with pytest.raises(ValueError):
        TierParams(power_dbm=30.0, density=1e-3, rate_threshold=1e6, bias=0.0)
    with pytest.raises(ValueError):
        TierParams(power_dbm=math.nan, density=1e-3, rate_threshold=1e6)


def test_network_validation(threetier):
    with pytest.raises(ValueError):
        NetworkConfig(tiers=(), user_density=0.05, bandwidth=1e7, path_loss_exponent=3.5)
    with pytest.raises(ValueError):
        NetworkConfig(
            tiers=threetier.tiers, user_density=0.05, bandwidth=1e7, path_loss_exponent=2.0
        )


def test_properties_return_fresh_arrays(threetier):
    d1 = threetier.densities
    d1[0] = -1.0
    assert threetier.densities[0] == 5e-4


def test_association_unbiased_favor_power_and_density(threetier):
    probs = association_probabilities(threetier)
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)
    # dense low-power and sparse high-power tiers both capture real share
    assert np.all(probs > 0.1)


def test_association_scale_invariance(threetier):
    doubled = threetier.with_biases(2.0 * threetier.biases)
    assert np.allclose(
        association_probabilities(threetier), association_probabilities(doubled), atol=1e-15
    )


def test_bias_inversion_round_trip(threetier, rng):
    target = rng.dirichlet(np.ones(3))
    biases = biases_for_association(threetier, target)
    assert biases.min() == pytest.approx(1.0)
    realized = association_probabilities(threetier.with_biases(biases))
    assert np.allclose(realized, target, atol=1e-12)


def test_bias_inversion_rejects_bad_targets(threetier):
    with pytest.raises(ValueError):
        biases_for_association(threetier, np.array([0.5, 0.5, 0.0]))
    with pytest.raises(ValueError):
        biases_for_association(threetier, np.array([0.6, 0.3, 0.3]))


def test_allocation_pair_validation():
    with pytest.raises(ValueError):
        AllocationPair(np.array([0.6, 0.5]), np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        AllocationPair(np.array([1.2, -0.2]), np.array([0.5, 0.5]))
    pair = AllocationPair(np.array([0.25, 0.75]), np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        pair.assoc[0] = 0.0  # read-only view


def test_sorted_by_density(threetier):
    ordered, index = threetier.sorted_by_density()
    assert list(ordered.densities) == sorted(threetier.densities, reverse=True)
    assert set(index) == {0, 1, 2}


def test_mean_load_scales_with_users(threetier):
    assoc = association_probabilities(threetier)
    loads = mean_load(threetier, assoc, LoadModel.MEAN)
    assert np.allclose(loads, assoc * threetier.user_density / threetier.densities)
    heavier = mean_load(threetier, assoc, LoadModel.HIGHER)
    assert np.all(heavier > loads)


def test_digest_stable_and_sensitive(threetier):
    d = network_digest(threetier)
    assert d == network_digest(threetier)
    assert len(d) == 12
    bumped = threetier.with_rate_thresholds(np.array([1e6, 1e6, 2e6]))
    assert network_digest(bumped) != d
