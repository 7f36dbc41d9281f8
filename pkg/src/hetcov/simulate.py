"""Monte Carlo validation of the analytic coverage model.

Each drop places independent Poisson AP fields of every tier in a disc
around a probe user at the origin, associates the user by biased strongest
average received power, draws Rayleigh fading, and scores the resulting SIR
against the serving tier's threshold.  Only same-tier APs interfere (tiers
occupy orthogonal spectrum).

Sampling is distance-based where possible: association and same-tier
interference depend only on AP distances from the origin, and the needed
order statistics have closed inverse CDFs (the nearest of n uniform points
in a disc of radius R has squared distance R^2*(1-u^(1/n)); the rest are
i.i.d. uniform on (d_min^2, R^2)).

Work is split into fixed-size chunks, each driven by a counter-based
generator keyed on (seed, chunk index), so outcomes are bit-identical for a
given seed regardless of thread count or chunk scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .coverage import EXP_CAP, _exponent_consts, _exponents, _tau_from_exponents
from .network import AllocationPair, LoadModel, NetworkConfig

__all__ = [
    "SimLoadMode",
    "SimConfig",
    "SimOutcome",
    "default_window_radius",
    "simulate_coverage",
    "simulate_assoc_distance",
    "analytic_distance_cdf",
]

_CHUNK = 1024


class SimLoadMode(Enum):
    """Where the per-drop SIR threshold comes from.

    ANALYTIC_AVERAGE uses the closed-form mean load (fast, distance-only
    sampling).  ACTUAL_COUNT also drops a user field and counts the users
    that share the serving AP, plus the probe itself (full positional
    sampling; much slower).
    """

    ANALYTIC_AVERAGE = "analytic_average"
    ACTUAL_COUNT = "actual_count"


@dataclass(frozen=True)
class SimConfig:
    """Monte Carlo run parameters.

    ``window_radius=None`` means "derive from the scenario": ten times the
    mean spacing scale of the sparsest tier, 10/sqrt(pi*min_density).  The
    window must keep the sparsest tier's expected nearest-AP distance below
    a fifth of the radius; that is checked when a run is constructed
    (the radius cannot be validated earlier without the scenario).
    """

    window_radius: float | None = None
    num_drops: int = 10_000
    seed: int = 0
    load_mode: SimLoadMode = SimLoadMode.ANALYTIC_AVERAGE

    def __post_init__(self) -> None:
        if self.window_radius is not None and not (self.window_radius > 0):
            raise ValueError("window_radius must be positive when given")
        if self.num_drops < 1:
            raise ValueError("num_drops must be at least 1")
        if not isinstance(self.seed, int):
            raise ValueError("seed must be an int")


@dataclass(frozen=True)
class SimOutcome:
    """Aggregated Monte Carlo result.

    ``coverage_estimate`` always equals ``per_tier_coverage.sum()``;
    ``per_tier_assoc_empirical`` are fractions of all drops (drops where
    every tier came up empty associate nowhere and count as not covered).
    ``seed`` and ``window_radius`` record how the run was produced.
    """

    coverage_estimate: float
    std_error: float
    per_tier_assoc_empirical: np.ndarray
    per_tier_coverage: np.ndarray
    drops: int
    seed: int
    window_radius: float


def default_window_radius(config: NetworkConfig) -> float:
    """Ten times the mean spacing scale of the sparsest tier."""
    return 10.0 / math.sqrt(math.pi * float(config.densities.min()))


def _resolve_window(config: NetworkConfig, sim: SimConfig) -> float:
    radius = sim.window_radius if sim.window_radius is not None else default_window_radius(config)
    # Expected nearest-AP distance of a tier with density lam is 1/(2*sqrt(lam)).
    worst = 1.0 / (2.0 * math.sqrt(float(config.densities.min())))
    if not worst < radius / 5.0:
        raise ValueError(
            f"window_radius {radius:g} too small: expected nearest-AP distance "
            f"{worst:g} of the sparsest tier must be below a fifth of the radius"
        )
    return radius


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _chunk_sizes(total: int) -> list[int]:
    full, rest = divmod(total, _CHUNK)
    return [_CHUNK] * full + ([rest] if rest else [])


def _nearest_sq(rng: np.random.Generator, counts: np.ndarray, r2: float) -> np.ndarray:
    """Squared distance of the nearest point per (drop, tier); inf if none."""
    u = rng.random(counts.shape)
    out = np.full(counts.shape, np.inf)
    got = counts > 0
    out[got] = r2 * (1.0 - u[got] ** (1.0 / counts[got]))
    return out


def _associate(config: NetworkConfig, nearest2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Serving tier per drop by biased strongest average power; also a mask
    of drops that found any AP at all."""
    alpha = config.path_loss_exponent
    weight = config.powers_watts * config.biases
    with np.errstate(divide="ignore"):
        metric = weight[None, :] * nearest2 ** (-alpha / 2.0)
    serving = np.argmax(metric, axis=1)
    has_ap = np.isfinite(nearest2).any(axis=1)
    return serving, has_ap


def _chunk_analytic(
    config: NetworkConfig,
    taus: np.ndarray,
    never: np.ndarray,
    radius: float,
    seed: int,
    index: int,
    size: int,
) -> tuple[np.ndarray, np.ndarray]:
    """One chunk of distance-only drops; returns per-tier (assoc, covered) counts."""
    K = config.num_tiers
    alpha = config.path_loss_exponent
    r2 = radius * radius
    rng = _chunk_rng(seed, index)

    counts = rng.poisson(lam=config.densities * math.pi * r2, size=(size, K))
    nearest2 = _nearest_sq(rng, counts, r2)
    h_serv = rng.standard_exponential(size)

    serving, has_ap = _associate(config, nearest2)
    rows = np.arange(size)
    m = np.where(has_ap, nearest2[rows, serving], np.nan)
    n_int = np.where(has_ap, counts[rows, serving] - 1, 0)

    total_int = int(n_int.sum())
    u_int = rng.random(total_int)
    h_int = rng.standard_exponential(total_int)
    rep = np.repeat(rows, n_int)
    lo = m[rep]
    d2 = lo + (r2 - lo) * u_int
    power = h_int * d2 ** (-alpha / 2.0)
    interference = np.bincount(rep, weights=power, minlength=size)

    with np.errstate(divide="ignore", invalid="ignore"):
        signal = h_serv * m ** (-alpha / 2.0)
        sir = signal / interference  # zero interference -> inf -> covered
    covered = has_ap & ~never[serving] & (sir >= taus[serving])

    assoc_counts = np.bincount(serving[has_ap], minlength=K)
    covered_counts = np.bincount(serving[covered], minlength=K)
    return assoc_counts, covered_counts


def _chunk_actual(
    config: NetworkConfig,
    alloc: AllocationPair,
    radius: float,
    seed: int,
    index: int,
    size: int,
) -> tuple[np.ndarray, np.ndarray]:
    """One chunk of fully positional drops with an explicit user field."""
    K = config.num_tiers
    alpha = config.path_loss_exponent
    r2 = radius * radius
    area = math.pi * r2
    weight = config.powers_watts * config.biases
    rates = config.rate_thresholds
    bandwidth = config.bandwidth
    rng = _chunk_rng(seed, index)

    assoc_counts = np.zeros(K, dtype=np.int64)
    covered_counts = np.zeros(K, dtype=np.int64)
    for _ in range(size):
        ap_counts = rng.poisson(lam=config.densities * area)
        n_users = int(rng.poisson(lam=config.user_density * area))
        ap_xy = []
        for k in range(K):
            n = int(ap_counts[k])
            r = radius * np.sqrt(rng.random(n))
            th = 2.0 * math.pi * rng.random(n)
            ap_xy.append(np.column_stack([r * np.cos(th), r * np.sin(th)]))
        ru = radius * np.sqrt(rng.random(n_users))
        tu = 2.0 * math.pi * rng.random(n_users)
        users = np.column_stack([ru * np.cos(tu), ru * np.sin(tu)])

        live = [k for k in range(K) if ap_counts[k] > 0]
        if not live:
            continue
        dists = {k: np.hypot(ap_xy[k][:, 0], ap_xy[k][:, 1]) for k in live}
        best_k = max(live, key=lambda k: weight[k] * float(dists[k].min()) ** (-alpha))
        i0 = int(np.argmin(dists[best_k]))
        assoc_counts[best_k] += 1

        # Users sharing the probe's AP: same winning tier, same nearest AP.
        shared = 0
        if n_users:
            user_metric = np.full((n_users, K), -np.inf)
            user_idx = np.zeros((n_users, K), dtype=np.int64)
            for k in live:
                diff = users[:, None, :] - ap_xy[k][None, :, :]
                d = np.hypot(diff[..., 0], diff[..., 1])
                user_idx[:, k] = np.argmin(d, axis=1)
                dmin = d[np.arange(n_users), user_idx[:, k]]
                with np.errstate(divide="ignore"):
                    user_metric[:, k] = weight[k] * dmin ** (-alpha)
            choice = np.argmax(user_metric, axis=1)
            shared = int(np.sum((choice == best_k) & (user_idx[:, best_k] == i0)))

        spectrum_share = float(alloc.spectrum[best_k])
        demand = rates[best_k] * (shared + 1) / bandwidth
        if spectrum_share <= 0.0 or demand / spectrum_share > EXP_CAP:
            continue
        tau = math.expm1(demand / spectrum_share * math.log(2.0))

        h = rng.standard_exponential(int(ap_counts[best_k]))
        powers = h * dists[best_k] ** (-alpha)
        signal = powers[i0]
        interference = powers.sum() - signal
        if interference == 0.0 or signal / interference >= tau:
            covered_counts[best_k] += 1
    return assoc_counts, covered_counts


def simulate_coverage(
    config: NetworkConfig,
    alloc: AllocationPair,
    sim: SimConfig,
    threads: int = 1,
) -> SimOutcome:
    """Estimate rate coverage by dropping Poisson scenarios around a probe user.

    Association follows the scenario's configured biases; the thresholds in
    ANALYTIC_AVERAGE mode come from ``alloc`` via the closed-form mean load,
    so the caller is responsible for pairing an allocation with biases that
    realize its association split (see
    :func:`hetcov.network.biases_for_association`).
    """
    if alloc.num_tiers != config.num_tiers:
        raise ValueError("allocation size does not match tier count")
    radius = _resolve_window(config, sim)
    sizes = _chunk_sizes(sim.num_drops)

    if sim.load_mode is SimLoadMode.ANALYTIC_AVERAGE:
        base, slope = _exponent_consts(config, LoadModel.MEAN)
        exps = _exponents(base, slope, alloc.assoc, alloc.spectrum)
        taus = _tau_from_exponents(exps)
        never = exps > EXP_CAP

        def job(i: int) -> tuple[np.ndarray, np.ndarray]:
            return _chunk_analytic(config, taus, never, radius, sim.seed, i, sizes[i])

    else:

        def job(i: int) -> tuple[np.ndarray, np.ndarray]:
            return _chunk_actual(config, alloc, radius, sim.seed, i, sizes[i])

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    else:
        parts = [job(i) for i in range(len(sizes))]

    K = config.num_tiers
    assoc = np.zeros(K, dtype=np.int64)
    covered = np.zeros(K, dtype=np.int64)
    for a, c in parts:
        assoc += a
        covered += c

    n = sim.num_drops
    estimate = float(covered.sum()) / n
    return SimOutcome(
        coverage_estimate=estimate,
        std_error=math.sqrt(max(estimate * (1.0 - estimate), 0.0) / n),
        per_tier_assoc_empirical=assoc / n,
        per_tier_coverage=covered / n,
        drops=n,
        seed=sim.seed,
        window_radius=radius,
    )


def simulate_assoc_distance(
    config: NetworkConfig,
    sim: SimConfig,
    tier: int,
    threads: int = 1,
) -> np.ndarray:
    """Empirical serving-distance sample for drops won by one tier.

    Returns the sorted distances (an empirical CDF support); compare against
    :func:`analytic_distance_cdf`.
    """
    if not 0 <= tier < config.num_tiers:
        raise ValueError("tier index out of range")
    radius = _resolve_window(config, sim)
    r2 = radius * radius
    sizes = _chunk_sizes(sim.num_drops)

    def job(i: int) -> np.ndarray:
        rng = _chunk_rng(sim.seed, i)
        counts = rng.poisson(lam=config.densities * math.pi * r2, size=(sizes[i], config.num_tiers))
        nearest2 = _nearest_sq(rng, counts, r2)
        serving, has_ap = _associate(config, nearest2)
        pick = has_ap & (serving == tier)
        return np.sqrt(nearest2[pick, tier])

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    else:
        parts = [job(i) for i in range(len(sizes))]
    return np.sort(np.concatenate(parts))


def analytic_distance_cdf(config: NetworkConfig, tier: int):
    """CDF of the serving distance conditioned on association with a tier.

    The conditional law is Rayleigh-type with effective density
    density_k / assoc_prob_k: F(r) = 1 - exp(-pi * (density_k / A_k) * r^2).
    """
    from .network import association_probabilities

    a_k = float(association_probabilities(config)[tier])
    lam = float(config.densities[tier]) / a_k

    def cdf(r):
        r = np.asarray(r, dtype=float)
        return 1.0 - np.exp(-math.pi * lam * r * r)

    return cdf
