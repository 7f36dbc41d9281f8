"""Scenario description and closed-form association/load rules for K-tier networks.

A scenario is a set of access-point tiers, each modelled as an independent
homogeneous planar Poisson process with its own transmit power, density,
association bias and per-user rate target, plus a global user density, total
bandwidth and a common path-loss exponent.  Users attach to the tier with the
strongest biased average received power, which gives simple closed forms for
the per-tier association probability and for the average number of users
sharing an access point.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

__all__ = [
    "CELL_AREA_LOAD_FACTOR",
    "TierParams",
    "NetworkConfig",
    "LoadModel",
    "AllocationPair",
    "dbm_to_watts",
    "association_probabilities",
    "biases_for_association",
    "mean_load",
    "network_digest",
]

# Correction applied on top of the plain users-per-AP average when the load is
# measured at a typical user: such a user sits in a larger-than-average cell
# and its own demand counts too, so the effective crowd it shares spectrum
# with is  1 + 1.28 * (plain average).
CELL_AREA_LOAD_FACTOR = 1.28

_SIMPLEX_TOL = 1e-12


def dbm_to_watts(power_dbm: float) -> float:
    """Convert a transmit power from dBm to watts."""
    return 10.0 ** ((power_dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class TierParams:
    """Physical parameters of a single access-point tier.

    Attributes
    ----------
    power_dbm : float
        Transmit power per AP, dBm.
    density : float
        APs per unit area, > 0.
    rate_threshold : float
        Per-user target rate in bit/s, > 0.
    bias : float
        Linear association bias, > 0.  Values below 1 are allowed: the
        constraint is positivity, and biases only matter up to a common
        scale.
    """

    power_dbm: float
    density: float
    rate_threshold: float
    bias: float = 1.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.power_dbm):
            raise ValueError("power_dbm must be finite")
        if not (math.isfinite(self.density) and self.density > 0):
            raise ValueError("density must be positive")
        if not (math.isfinite(self.rate_threshold) and self.rate_threshold > 0):
            raise ValueError("rate_threshold must be positive")
        if not (math.isfinite(self.bias) and self.bias > 0):
            raise ValueError("bias must be positive")

    @property
    def power_watts(self) -> float:
        return dbm_to_watts(self.power_dbm)


@dataclass(frozen=True)
class NetworkConfig:
    """A full K-tier scenario.

    Attributes
    ----------
    tiers : tuple of TierParams
        At least one tier.
    user_density : float
        Users per unit area, > 0.
    bandwidth : float
        Total system bandwidth in Hz, > 0.  Each tier gets an orthogonal
        slice of it; APs of the same tier reuse their slice everywhere.
    path_loss_exponent : float
        Common path-loss exponent, strictly greater than 2 (the interference
        and association integrals diverge otherwise).
    """

    tiers: tuple[TierParams, ...]
    user_density: float
    bandwidth: float
    path_loss_exponent: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "tiers", tuple(self.tiers))
        if len(self.tiers) < 1:
            raise ValueError("at least one tier is required")
        if not all(isinstance(t, TierParams) for t in self.tiers):
            raise ValueError("tiers must be TierParams instances")
        if not (math.isfinite(self.user_density) and self.user_density > 0):
            raise ValueError("user_density must be positive")
        if not (math.isfinite(self.bandwidth) and self.bandwidth > 0):
            raise ValueError("bandwidth must be positive")
        if not (math.isfinite(self.path_loss_exponent) and self.path_loss_exponent > 2):
            raise ValueError("path_loss_exponent must exceed 2")

    @property
    def num_tiers(self) -> int:
        return len(self.tiers)

    @property
    def densities(self) -> np.ndarray:
        return np.array([t.density for t in self.tiers])

    @property
    def powers_watts(self) -> np.ndarray:
        return np.array([t.power_watts for t in self.tiers])

    @property
    def biases(self) -> np.ndarray:
        return np.array([t.bias for t in self.tiers])

    @property
    def rate_thresholds(self) -> np.ndarray:
        return np.array([t.rate_threshold for t in self.tiers])

    def with_biases(self, biases) -> "NetworkConfig":
        """Return a copy with per-tier biases replaced."""
        biases = np.asarray(biases, dtype=float)
        if biases.shape != (self.num_tiers,):
            raise ValueError("biases must have one entry per tier")
        tiers = tuple(replace(t, bias=float(b)) for t, b in zip(self.tiers, biases))
        return replace(self, tiers=tiers)

    def with_rate_thresholds(self, thresholds) -> "NetworkConfig":
        """Return a copy with per-tier rate targets replaced."""
        thresholds = np.asarray(thresholds, dtype=float)
        if thresholds.shape != (self.num_tiers,):
            raise ValueError("thresholds must have one entry per tier")
        tiers = tuple(
            replace(t, rate_threshold=float(r)) for t, r in zip(self.tiers, thresholds)
        )
        return replace(self, tiers=tiers)

    def sorted_by_density(self) -> tuple["NetworkConfig", np.ndarray]:
        """Return (copy with tiers sorted by descending density, index map).

        ``index_map[i]`` is the position in the original tier list of the
        i-th tier of the sorted copy.  Sorting is a stable normalization so
        that otherwise-identical scenarios written in a different tier order
        produce identical downstream tables.
        """
        order = np.argsort(-self.densities, kind="stable")
        tiers = tuple(self.tiers[i] for i in order)
        return replace(self, tiers=tiers), order


class LoadModel(Enum):
    """How the number of users sharing an AP's spectrum slice is modelled.

    MEAN is the plain average: association probability times the user/AP
    density ratio.  HIGHER adds the served user itself plus the cell-area
    weighting correction (factor 1.28), which better reflects the crowd seen
    by a typical user.
    """

    MEAN = "mean"
    HIGHER = "higher"


@dataclass(frozen=True)
class AllocationPair:
    """A feasible allocation: association split and spectrum split.

    Both vectors live on the probability simplex (entries in [0, 1], summing
    to 1 within 1e-12).  Arrays are copied and frozen.
    """

    assoc: np.ndarray
    spectrum: np.ndarray

    def __post_init__(self) -> None:
        assoc = np.array(self.assoc, dtype=float)
        spectrum = np.array(self.spectrum, dtype=float)
        if assoc.ndim != 1 or assoc.shape != spectrum.shape:
            raise ValueError("assoc and spectrum must be 1-D with equal length")
        for name, v in (("assoc", assoc), ("spectrum", spectrum)):
            if np.any(v < 0) or np.any(v > 1):
                raise ValueError(f"{name} entries must lie in [0, 1]")
            if abs(v.sum() - 1.0) > _SIMPLEX_TOL:
                raise ValueError(f"{name} must sum to 1 within {_SIMPLEX_TOL}")
        assoc.setflags(write=False)
        spectrum.setflags(write=False)
        object.__setattr__(self, "assoc", assoc)
        object.__setattr__(self, "spectrum", spectrum)

    @property
    def num_tiers(self) -> int:
        return self.assoc.shape[0]


def association_probabilities(config: NetworkConfig) -> np.ndarray:
    """Per-tier probability of serving a typical user.

    Under biased strongest-average-power association each tier wins with
    probability proportional to  density * (power * bias)^(2/alpha).
    Returns a vector on the simplex; a single tier gets exactly [1.0].
    """
    expo = 2.0 / config.path_loss_exponent
    score = config.densities * (config.powers_watts * config.biases) ** expo
    return score / score.sum()


def biases_for_association(config: NetworkConfig, target_assoc) -> np.ndarray:
    """Invert the association rule: biases that realize a target split.

    Biases are only identified up to a common positive scale; the returned
    vector is normalized so its smallest entry is 1.  All targets must be
    strictly positive (a zero-probability tier has no finite bias).
    Round-trips with :func:`association_probabilities`.
    """
    target = np.asarray(target_assoc, dtype=float)
    if target.shape != (config.num_tiers,):
        raise ValueError("target_assoc must have one entry per tier")
    if np.any(target <= 0):
        raise ValueError("target association probabilities must be positive")
    if abs(target.sum() - 1.0) > 1e-9:
        raise ValueError("target_assoc must sum to 1")
    half_alpha = config.path_loss_exponent / 2.0
    biases = (target / config.densities) ** half_alpha / config.powers_watts
    return biases / biases.min()


def network_digest(config: NetworkConfig) -> str:
    """Short content hash of a scenario (canonical JSON, sha256, 12 hex chars).

    Stable across runs and platforms; used to stamp result rows with the
    scenario they were computed from.
    """
    doc = {
        "user_density": config.user_density,
        "bandwidth_hz": config.bandwidth,
        "path_loss_exponent": config.path_loss_exponent,
        "tiers": [
            {
                "power_dbm": t.power_dbm,
                "density": t.density,
                "rate_threshold_bps": t.rate_threshold,
                "bias": t.bias,
            }
            for t in config.tiers
        ],
    }
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def mean_load(config: NetworkConfig, assoc, model: LoadModel = LoadModel.MEAN) -> np.ndarray:
    """Average number of users sharing one AP's spectrum slice, per tier.

    MEAN gives assoc_k * user_density / density_k; HIGHER gives
    1 + 1.28 times that (self plus cell-area weighting).
    """
    assoc = np.asarray(assoc, dtype=float)
    if assoc.shape != (config.num_tiers,):
        raise ValueError("assoc must have one entry per tier")
    plain = assoc * config.user_density / config.densities
    if model is LoadModel.MEAN:
        return plain
    if model is LoadModel.HIGHER:
        return 1.0 + CELL_AREA_LOAD_FACTOR * plain
    raise ValueError(f"unknown load model: {model!r}")
