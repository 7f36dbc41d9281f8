import numpy as np
import pytest

from hetcov import NetworkConfig, SolveOptions, TierParams


@pytest.fixture(scope="session")
def threetier() -> NetworkConfig:
    """Macro/micro/pico reference scenario used throughout the suite."""
    return NetworkConfig(
        tiers=(
            TierParams(power_dbm=46.0, density=5e-4, rate_threshold=1e6),
            TierParams(power_dbm=30.0, density=2.5e-3, rate_threshold=1e6),
            TierParams(power_dbm=20.0, density=1e-2, rate_threshold=1e6),
        ),
        user_density=0.05,
        bandwidth=1e7,
        path_loss_exponent=3.5,
    )


@pytest.fixture(scope="session")
def twotier() -> NetworkConfig:
    return NetworkConfig(
        tiers=(
            TierParams(power_dbm=43.0, density=1e-3, rate_threshold=5e5),
            TierParams(power_dbm=23.0, density=5e-3, rate_threshold=5e5),
        ),
        user_density=0.02,
        bandwidth=1e7,
        path_loss_exponent=4.0,
    )


@pytest.fixture
def fast_opts() -> SolveOptions:
    """Fewer restarts for tests where solve quality is not the point."""
    return SolveOptions(restarts=2)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)
