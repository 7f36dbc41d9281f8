"""SIR and rate coverage for K-tier downlink networks with orthogonal tier spectrum.

The central quantity is an interference penalty: for a user served by the
nearest AP of a tier under Rayleigh fading, the probability of clearing a
linear SIR threshold ``t`` at distance ``r`` is
``exp(-pi * density * r^2 * penalty(t, alpha))`` with

    penalty(t, alpha) = t^(2/alpha) * integral_{t^(-2/alpha)}^inf du / (1 + u^(alpha/2)).

Everything else is built on that kernel: per-tier SIR thresholds implied by
rate demands and load, the total rate-coverage objective over an
(association, spectrum) allocation, its analytic gradients, and a stationarity
residual used by the solvers.

Tiers are interference-limited and only interfere with themselves (each tier
occupies an orthogonal slice of the band, reused by all of its APs).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .network import (
    CELL_AREA_LOAD_FACTOR,
    AllocationPair,
    LoadModel,
    NetworkConfig,
    association_probabilities,
)

__all__ = [
    "EXP_CAP",
    "SirSample",
    "CoverageReport",
    "interference_penalty",
    "interference_penalty_deriv",
    "sir_threshold",
    "tier_coverage_term",
    "rate_coverage",
    "grad_spectrum",
    "grad_assoc",
    "kkt_residual",
    "per_tier_coverage_integral",
]

# Cap on the spectral-efficiency exponent rate*load/(bandwidth*share).
# 2^1000 is still representable in float64 (max ~2^1024), so clamping the
# exponent here keeps every downstream quantity finite while the tier's
# coverage is treated as exactly zero.
EXP_CAP = 1000.0

_LN2 = math.log(2.0)
# Threshold value at the cap, ~1.07e301. Finite by construction.
_TAU_CAP = math.expm1(EXP_CAP * _LN2)
# Alternating-series cutoffs for the penalty integral: below _edge(m) the
# integrand's u^m term is <= 1e-6 and 8 series terms give ~1e-48 accuracy;
# symmetrically above max(lower,1)/_edge(m) for the tail.
_SERIES_TERMS = 8


@dataclass(frozen=True)
class SirSample:
    """A single linear SIR value; thin validated wrapper."""

    value: float

    def __post_init__(self) -> None:
        if not (self.value >= 0):
            raise ValueError("SIR must be nonnegative")


@dataclass(frozen=True)
class CoverageReport:
    """Objective value and per-tier diagnostics at one allocation.

    ``objective`` is the sum of ``per_tier_terms``; each term lies in
    [0, assoc_k].  ``sir_thresholds`` holds the per-tier linear SIR
    thresholds (clamped at the overflow cap, so always finite).
    """

    objective: float
    per_tier_terms: np.ndarray
    grad_assoc: np.ndarray
    grad_spectrum: np.ndarray
    sir_thresholds: np.ndarray


def _edge(m: float) -> float:
    return 10.0 ** (-6.0 / m)


@lru_cache(maxsize=1 << 20)
def _penalty_cached(tau: float, alpha: float) -> float:
    m = alpha / 2.0
    lower = tau ** (-2.0 / alpha)
    low_edge = _edge(m)
    high_edge = max(lower, 1.0) / low_edge

    total = 0.0
    # Head: on [lower, low_edge] expand 1/(1+u^m) = sum (-1)^n u^(nm).
    if lower < low_edge:
        for n in range(_SERIES_TERMS):
            p = n * m + 1.0
            total += (-1.0) ** n * (low_edge**p - lower**p) / p
    # Middle: adaptive quadrature on the moderate range.
    mid_lo = max(lower, low_edge)
    total += quad(
        lambda u: 1.0 / (1.0 + u**m),
        mid_lo,
        high_edge,
        epsabs=0.0,
        epsrel=1e-13,
        limit=200,
    )[0]
    # Tail: beyond high_edge expand 1/(1+u^m) = sum (-1)^(n+1) u^(-nm).
    for n in range(1, _SERIES_TERMS + 1):
        total += (-1.0) ** (n + 1) * high_edge ** (1.0 - n * m) / (n * m - 1.0)
    return tau ** (2.0 / alpha) * total


def interference_penalty(tau: float, alpha: float) -> float:
    """Interference penalty kernel of the nearest-AP coverage probability.

    Computes ``tau^(2/alpha) * integral_{tau^(-2/alpha)}^inf du/(1+u^(alpha/2))``.
    Strictly increasing and unbounded in ``tau``; zero at ``tau = 0``.

    Parameters
    ----------
    tau : float
        Linear SIR threshold, >= 0.
    alpha : float
        Path-loss exponent, > 2.
    """
    if not (alpha > 2.0 and math.isfinite(alpha)):
        raise ValueError("alpha must be a finite value greater than 2")
    if not (tau >= 0.0 and math.isfinite(tau)):
        raise ValueError("tau must be a finite nonnegative value")
    if tau == 0.0:
        return 0.0
    return _penalty_cached(float(tau), float(alpha))


def interference_penalty_deriv(tau: float, alpha: float) -> float:
    """Derivative of :func:`interference_penalty` in its first argument.

    Uses the identity  d/dtau = (2/(alpha*tau)) * (penalty + tau/(1+tau)),
    which follows from differentiating under the integral sign.  Rejects
    ``tau = 0`` (the one-sided limit 1 + 2/(alpha-2) exists but the formula
    above is singular there).
    """
    if not (tau > 0.0 and math.isfinite(tau)):
        raise ValueError("tau must be a finite positive value")
    pen = interference_penalty(tau, alpha)
    return 2.0 / (alpha * tau) * (pen + tau / (1.0 + tau))


# ---------------------------------------------------------------------------
# Exponent bookkeeping.
#
# The spectral-efficiency exponent of tier k is  e_k = R_k * N_k / (W * w_k).
# With the MEAN load  N_k = A_k * user_density / density_k  this is
# (slope_k * A_k) / w_k; with the HIGHER load  N_k = 1 + 1.28 * A_k * ud/d_k
# it is (base_k + slope_k * A_k) / w_k.  base/slope are per-tier constants.
# ---------------------------------------------------------------------------


def _exponent_consts(config: NetworkConfig, model: LoadModel) -> tuple[np.ndarray, np.ndarray]:
    rates = config.rate_thresholds
    ratio = rates * config.user_density / (config.densities * config.bandwidth)
    if model is LoadModel.MEAN:
        return np.zeros(config.num_tiers), ratio
    if model is LoadModel.HIGHER:
        return rates / config.bandwidth, CELL_AREA_LOAD_FACTOR * ratio
    raise ValueError(f"unknown load model: {model!r}")


def _exponents(base: np.ndarray, slope: np.ndarray, assoc: np.ndarray, spectrum: np.ndarray) -> np.ndarray:
    """Raw exponents; inf where demand is positive but the share is zero."""
    demand = base + slope * assoc
    out = np.full_like(demand, np.inf)
    np.divide(demand, spectrum, out=out, where=spectrum > 0)
    out[demand == 0.0] = 0.0
    return out


def _tau_from_exponents(exponents: np.ndarray) -> np.ndarray:
    """Linear SIR thresholds 2^e - 1, clamped at the overflow cap."""
    capped = np.minimum(exponents, EXP_CAP)
    return np.expm1(capped * _LN2)


def _penalty_vec(taus: np.ndarray, alpha: float) -> np.ndarray:
    return np.array([interference_penalty(float(t), alpha) for t in taus])


def _coverage_terms(
    assoc: np.ndarray, penalties: np.ndarray, overflow: np.ndarray
) -> np.ndarray:
    terms = np.zeros_like(assoc)
    live = (assoc > 0) & ~overflow
    a = assoc[live]
    terms[live] = a / (1.0 + a * penalties[live])
    return terms


def _grads(
    alpha: float,
    base: np.ndarray,
    slope: np.ndarray,
    assoc: np.ndarray,
    spectrum: np.ndarray,
    use_relation: bool,
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradients of the per-tier coverage terms.

    ``use_relation`` selects the cheaper identity
        d/dA = 1/(1+A*pen)^2 - (w/A) * d/dw,
    valid exactly when the exponent is proportional to A (MEAN load); the
    HIGHER load has an affine exponent and takes the direct chain rule.

    Overflowed tiers are evaluated at the cap with the spectrum share that
    would realize it (finite positive climb-out signal instead of inf/0).
    """
    K = assoc.shape[0]
    pref = 2.0 * _LN2 / alpha
    exps = _exponents(base, slope, assoc, spectrum)
    e_eff = np.minimum(exps, EXP_CAP)
    taus = np.expm1(e_eff * _LN2)

    grad_w = np.zeros(K)
    grad_a = np.ones(K)  # tau = 0 limit: term ~ A, so d/dA -> 1 and d/dw -> 0

    for k in range(K):
        if exps[k] == 0.0:
            continue
        a = assoc[k]
        if a == 0.0:
            # Empty tier: term is identically 0 along w, and grows like A
            # from below (d/dA -> 1/(1+0)^2 = 1 for both load models).
            continue
        tau = taus[k]
        pen = interference_penalty(float(tau), alpha)
        # ((1+tau)*pen + tau)/tau, written to avoid overflow at huge tau.
        bracket = pen * (1.0 + 1.0 / tau) + 1.0
        demand = base[k] + slope[k] * a
        # Capped tiers are evaluated at the share that would realize the cap,
        # giving a finite positive climb-out signal instead of inf/0.
        w_eff = spectrum[k] if exps[k] <= EXP_CAP else demand / EXP_CAP
        inv_a = 1.0 / a
        denom = inv_a + pen
        # d/dw: pref * bracket * (e/w) / (1/A + pen)^2, ratio form.
        grad_w[k] = pref * (e_eff[k] / w_eff) * (bracket / denom) / denom
        if use_relation:
            inv_term = 1.0 / (1.0 + a * pen)
            grad_a[k] = inv_term * inv_term - (w_eff / a) * grad_w[k]
        else:
            dexp_da = slope[k] / w_eff
            numerator = 1.0 - a * a * pref * bracket * dexp_da
            inv_term = 1.0 / (1.0 + a * pen)
            grad_a[k] = (numerator * inv_term) * inv_term
    return grad_a, grad_w


def sir_threshold(
    config: NetworkConfig,
    assoc,
    spectrum,
    tier: int,
    model: LoadModel = LoadModel.MEAN,
) -> float:
    """Linear SIR threshold a tier must clear to sustain its rate target.

    Equals ``2^(rate * load / (bandwidth * share)) - 1``.  The exponent is
    clamped at :data:`EXP_CAP`, so the return value is always finite; an
    exponent past the cap means the tier is treated as having zero coverage
    by :func:`rate_coverage`.  A tier with zero demand (empty under MEAN
    load) has threshold 0.  Requires spectrum share > 0 unless the tier's
    demand is zero.
    """
    assoc = np.asarray(assoc, dtype=float)
    spectrum = np.asarray(spectrum, dtype=float)
    base, slope = _exponent_consts(config, model)
    exps = _exponents(base, slope, assoc, spectrum)
    return float(_tau_from_exponents(exps)[tier])


def tier_coverage_term(
    config: NetworkConfig,
    assoc,
    spectrum,
    tier: int,
    model: LoadModel = LoadModel.MEAN,
) -> float:
    """One tier's coverage term at raw (possibly off-simplex) split vectors.

    Evaluates ``A_k / (1 + A_k * penalty(tau_k, alpha))`` without simplex
    validation, which makes it usable for one-coordinate perturbations
    (finite differences of the partial derivatives).  Terms follow the same
    edge rules as :func:`rate_coverage` (empty or overflow-capped tiers
    contribute 0).
    """
    assoc = np.asarray(assoc, dtype=float)
    spectrum = np.asarray(spectrum, dtype=float)
    base, slope = _exponent_consts(config, model)
    exps = _exponents(base, slope, assoc, spectrum)
    a = float(assoc[tier])
    if a <= 0.0 or exps[tier] > EXP_CAP:
        return 0.0
    tau = float(_tau_from_exponents(exps)[tier])
    pen = interference_penalty(tau, config.path_loss_exponent)
    return a / (1.0 + a * pen)


def rate_coverage(
    config: NetworkConfig,
    alloc: AllocationPair,
    model: LoadModel = LoadModel.MEAN,
) -> CoverageReport:
    """Total rate coverage and per-tier diagnostics at one allocation.

    The objective is  sum_k  A_k / (1 + A_k * penalty(tau_k, alpha))  where
    tau_k is the tier's SIR threshold under the given load model.  Tiers
    with A_k = 0 contribute 0; tiers whose exponent exceeds the overflow cap
    contribute 0 (their threshold is unattainable).
    """
    if alloc.num_tiers != config.num_tiers:
        raise ValueError("allocation size does not match tier count")
    alpha = config.path_loss_exponent
    base, slope = _exponent_consts(config, model)
    exps = _exponents(base, slope, alloc.assoc, alloc.spectrum)
    overflow = exps > EXP_CAP
    taus = _tau_from_exponents(exps)
    pens = _penalty_vec(taus, alpha)
    terms = _coverage_terms(alloc.assoc, pens, overflow)
    grad_a, grad_w = _grads(
        alpha, base, slope, alloc.assoc, alloc.spectrum, use_relation=model is LoadModel.MEAN
    )
    return CoverageReport(
        objective=float(terms.sum()),
        per_tier_terms=terms,
        grad_assoc=grad_a,
        grad_spectrum=grad_w,
        sir_thresholds=taus,
    )


def grad_spectrum(
    config: NetworkConfig,
    alloc: AllocationPair,
    model: LoadModel = LoadModel.MEAN,
) -> np.ndarray:
    """Partial derivatives of the per-tier coverage terms in the spectrum shares.

    Strictly positive wherever the tier has users and a positive threshold
    (more spectrum always helps); exactly 0 where the threshold is 0 or the
    tier is empty.
    """
    if alloc.num_tiers != config.num_tiers:
        raise ValueError("allocation size does not match tier count")
    base, slope = _exponent_consts(config, model)
    _, grad_w = _grads(
        config.path_loss_exponent,
        base,
        slope,
        alloc.assoc,
        alloc.spectrum,
        use_relation=model is LoadModel.MEAN,
    )
    return grad_w


def grad_assoc(
    config: NetworkConfig,
    alloc: AllocationPair,
    model: LoadModel = LoadModel.MEAN,
) -> np.ndarray:
    """Partial derivatives of the per-tier coverage terms in the association split.

    Can take either sign: more users raise the tier's term directly but
    tighten its SIR threshold through the load.  Tends to 1 as a tier
    empties (the term grows like A there).
    """
    if alloc.num_tiers != config.num_tiers:
        raise ValueError("allocation size does not match tier count")
    base, slope = _exponent_consts(config, model)
    grad_a, _ = _grads(
        config.path_loss_exponent,
        base,
        slope,
        alloc.assoc,
        alloc.spectrum,
        use_relation=model is LoadModel.MEAN,
    )
    return grad_a


def kkt_residual(
    config: NetworkConfig,
    alloc: AllocationPair,
    model: LoadModel = LoadModel.MEAN,
) -> float:
    """Stationarity residual of the two-simplex maximization at an allocation.

    At an interior optimum both gradient vectors are constant across tiers
    (their multipliers are the means), so the residual
    ``max_k |gA_k - mean(gA)| + |gw_k - mean(gw)|`` vanishes.  Tiers on the
    boundary (A_k = 0 or w_k = 0) are excluded from the active set; with at
    most one active tier the residual is 0 by convention.
    """
    if alloc.num_tiers != config.num_tiers:
        raise ValueError("allocation size does not match tier count")
    active = (alloc.assoc > 0) & (alloc.spectrum > 0)
    if active.sum() <= 1:
        return 0.0
    base, slope = _exponent_consts(config, model)
    grad_a, grad_w = _grads(
        config.path_loss_exponent,
        base,
        slope,
        alloc.assoc,
        alloc.spectrum,
        use_relation=model is LoadModel.MEAN,
    )
    ga = grad_a[active]
    gw = grad_w[active]
    return float(np.max(np.abs(ga - ga.mean()) + np.abs(gw - gw.mean())))


def per_tier_coverage_integral(
    config: NetworkConfig,
    alloc: AllocationPair,
    model: LoadModel,
    tier: int,
) -> float:
    """Direct quadrature of one tier's coverage term over the serving distance.

    Evaluates ``integral_0^inf 2*pi*density_k*r * exp(-pi*density_k*r^2 *
    [penalty(tau_k, alpha) + S_k]) dr`` where ``S_k = sum_j (density_j /
    density_k) * (P_j B_j / (P_k B_k))^(2/alpha)`` comes from the configured
    biases (``S_k`` is the reciprocal of the tier's association
    probability).  Serves as an independent check of the closed form
    ``1 / (1/A_k + penalty)``.  Tiers past the overflow cap return 0.
    """
    if alloc.num_tiers != config.num_tiers:
        raise ValueError("allocation size does not match tier count")
    if not 0 <= tier < config.num_tiers:
        raise ValueError("tier index out of range")
    alpha = config.path_loss_exponent
    base, slope = _exponent_consts(config, model)
    exps = _exponents(base, slope, alloc.assoc, alloc.spectrum)
    if exps[tier] > EXP_CAP:
        return 0.0
    tau = float(_tau_from_exponents(exps)[tier])
    pen = interference_penalty(tau, alpha) if tau > 0 else 0.0
    inv_assoc = 1.0 / association_probabilities(config)[tier]
    lam = config.densities[tier]
    coef = math.pi * lam * (pen + inv_assoc)

    def integrand(r: float) -> float:
        return 2.0 * math.pi * lam * r * math.exp(-coef * r * r)

    val, _ = quad(integrand, 0.0, np.inf, epsabs=1e-13, epsrel=1e-11, limit=200)
    return float(val)
