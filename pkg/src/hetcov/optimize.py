"""Allocation solvers for the rate-coverage objective.

Four modes: a joint projected-gradient ascent over the association and
spectrum simplices (the workhorse), a closed-form equal-fractions solution
(association share equal to spectrum share), a spectrum-only ascent for
unbiased strongest-power association, and an exhaustive lattice search used
as the oracle in validation.

The ascent is spectral projected gradient: analytic gradients, a
Barzilai-Borwein initial step, Armijo backtracking against the projected
step's predicted gain, and Euclidean projection onto the simplex.
Coordinates that sit at the positivity floor for 50 consecutive iterations
are frozen at exactly zero so the active-set stationarity residual can
settle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .coverage import EXP_CAP, _exponent_consts, _exponents, _grads, interference_penalty, rate_coverage
from .network import AllocationPair, LoadModel, NetworkConfig, association_probabilities

__all__ = [
    "SolveOptions",
    "SolveMode",
    "SolveResult",
    "project_simplex",
    "optimize_joint",
    "optimize_equal_fractions",
    "optimize_spectrum_maxsir",
    "brute_force",
]

_LN2 = math.log(2.0)
_FLOOR = 1e-9        # positivity floor keeping gradients finite
_SNAP = 10 * _FLOOR  # coordinates at or below this are zeroed on exit
_PIN_ITERS = 50      # floor dwell time before a coordinate is frozen at 0
_ARMIJO_C = 1e-4
_MAX_HALVINGS = 60
_LATTICE_LIMIT = 10_000_000


@dataclass(frozen=True)
class SolveOptions:
    """Tunables shared by the iterative solvers and the lattice search."""

    tolerance: float = 1e-8
    max_iterations: int = 10_000
    restarts: int = 8
    grid_step: float = 0.01

    def __post_init__(self) -> None:
        if not (self.tolerance > 0):
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.restarts < 0:
            raise ValueError("restarts must be nonnegative")
        if not (0 < self.grid_step <= 0.5):
            raise ValueError("grid_step must lie in (0, 0.5]")


class SolveMode(Enum):
    JOINT = "joint"
    EQUAL_FRACTIONS = "equal_fractions"
    MAX_SIR_SPECTRUM_ONLY = "max_sir_spectrum_only"
    BRUTE_FORCE = "brute_force"


@dataclass(frozen=True)
class SolveResult:
    """Solver output; ``report`` is recomputed at the returned allocation."""

    alloc: AllocationPair
    report: object
    converged: bool
    iterations: int
    mode: SolveMode
    degenerate: bool = False


def project_simplex(v) -> np.ndarray:
    """Euclidean projection of a vector onto the probability simplex.

    Sort-based non-iterative algorithm: find the largest support whose
    shifted entries stay positive, shift, clamp.  O(K log K).
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("expected a nonempty 1-D vector")
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    support = u - css / idx > 0
    k = idx[support][-1]
    theta = css[k - 1] / k
    return np.maximum(v - theta, 0.0)


def _feasible(x: np.ndarray, frozen: np.ndarray) -> np.ndarray:
    """Project free coordinates onto the simplex, keep frozen ones at 0,
    then clamp free coordinates to the positivity floor and renormalize."""
    out = np.zeros_like(x)
    free = ~frozen
    p = project_simplex(x[free])
    p = np.maximum(p, _FLOOR)
    out[free] = p / p.sum()
    return out


def _objective(alpha: float, base, slope, assoc, spectrum) -> float:
    exps = _exponents(base, slope, assoc, spectrum)
    live = (assoc > 0) & (exps <= EXP_CAP)
    total = 0.0
    for k in np.nonzero(live)[0]:
        e = exps[k]
        pen = interference_penalty(float(np.expm1(e * _LN2)), alpha) if e > 0 else 0.0
        total += assoc[k] / (1.0 + assoc[k] * pen)
    return total


def _residual(gA, gw, active, move_assoc: bool) -> float:
    if active.sum() <= 1:
        return 0.0
    gw_a = gw[active]
    r = np.abs(gw_a - gw_a.mean())
    if move_assoc:
        ga_a = gA[active]
        r = r + np.abs(ga_a - ga_a.mean())
    return float(r.max())


def _ascent(alpha, base, slope, A0, w0, opts: SolveOptions, move_assoc: bool, use_relation: bool):
    """Projected gradient ascent from one start; returns
    (assoc, spectrum, value, iterations, converged)."""
    K = A0.size
    frozen_a = np.zeros(K, dtype=bool)
    frozen_w = np.zeros(K, dtype=bool)
    pin_a = np.zeros(K, dtype=int)
    pin_w = np.zeros(K, dtype=int)
    A = _feasible(np.asarray(A0, dtype=float), frozen_a) if move_assoc else np.asarray(A0, dtype=float)
    w = _feasible(np.asarray(w0, dtype=float), frozen_w)
    val = _objective(alpha, base, slope, A, w)
    step = 1.0
    prev = None
    converged = False
    stalls = 0
    it = 0

    for it in range(1, opts.max_iterations + 1):
        gA, gw = _grads(alpha, base, slope, A, w, use_relation)
        if move_assoc:
            gA[frozen_a] = 0.0
        else:
            gA = np.zeros(K)
        gw[frozen_w] = 0.0

        active = (~frozen_a) & (~frozen_w) & (A > _SNAP) & (w > _SNAP)
        res = _residual(gA, gw, active, move_assoc)
        if res < opts.tolerance:
            converged = True
            break

        if prev is not None:
            s = np.concatenate([A - prev[0], w - prev[1]])
            y = np.concatenate([gA - prev[2], gw - prev[3]])
            ss = float(s @ s)
            sy = abs(float(s @ y))
            if ss > 0 and sy > 0:
                step = min(max(ss / sy, 1e-10), 1e10)
        prev = (A.copy(), w.copy(), gA.copy(), gw.copy())

        t = step
        accepted = False
        for _ in range(_MAX_HALVINGS):
            A_t = _feasible(A + t * gA, frozen_a) if move_assoc else A
            w_t = _feasible(w + t * gw, frozen_w)
            pred = float(gA @ (A_t - A) + gw @ (w_t - w))
            if pred <= 0.0:
                break
            v_t = _objective(alpha, base, slope, A_t, w_t)
            if v_t >= val + _ARMIJO_C * pred:
                accepted = True
                break
            t *= 0.5

        if accepted:
            A, w, val = A_t, w_t, v_t
            step = t * 2.0
            stalls = 0
        else:
            stalls += 1

        # Track coordinates pinned at the floor; freeze after a dwell so the
        # active-set residual can settle on the interior tiers.
        if move_assoc:
            at_floor = (~frozen_a) & (A <= 2 * _FLOOR)
            pin_a = np.where(at_floor, pin_a + 1, 0)
            newly = (pin_a >= _PIN_ITERS) & ~frozen_a
            if newly.any() and (~(frozen_a | newly)).sum() >= 1:
                frozen_a |= newly
                A = _feasible(A, frozen_a)
                val = _objective(alpha, base, slope, A, w)
        at_floor_w = (~frozen_w) & (w <= 2 * _FLOOR)
        pin_w = np.where(at_floor_w, pin_w + 1, 0)
        newly_w = (pin_w >= _PIN_ITERS) & ~frozen_w
        if newly_w.any() and (~(frozen_w | newly_w)).sum() >= 1:
            frozen_w |= newly_w
            w = _feasible(w, frozen_w)
            val = _objective(alpha, base, slope, A, w)

        if not accepted:
            pinning = (pin_a > 0).any() or (pin_w > 0).any()
            if stalls >= 3 and not pinning:
                # The line search cannot improve the objective at float
                # resolution (gains scale as residual^2, which underflows
                # against a value of order 1 once the residual is ~1e-8).
                # A point that stalls with the spread nearly at target is
                # stationary to working precision, not a failure.
                converged = res <= 100.0 * opts.tolerance
                break

    return A, w, val, it, converged


def _snap_boundary(A: np.ndarray, w: np.ndarray, move_assoc: bool) -> tuple[np.ndarray, np.ndarray]:
    """Zero out coordinates that finished at the floor, pairwise per tier."""
    dead = (A <= _SNAP) & (w <= _SNAP) if move_assoc else (w <= _SNAP)
    if dead.all():
        return A, w
    if dead.any():
        if move_assoc:
            A = np.where(dead, 0.0, A)
            A = A / A.sum()
        w = np.where(dead, 0.0, w)
        w = w / w.sum()
    return A, w


def _equal_fractions_point(config: NetworkConfig) -> tuple[np.ndarray, bool]:
    """Closed-form equal-fractions split: weights 1/penalty(tau_bar_k)."""
    base, slope = _exponent_consts(config, LoadModel.MEAN)
    exps = slope  # exponent with assoc == spectrum cancels the common value
    alpha = config.path_loss_exponent
    taus = np.expm1(np.minimum(exps, EXP_CAP) * _LN2)
    if np.any(taus == 0.0):
        # Zero-threshold tiers have unbounded weight; split equally among them.
        A = np.where(taus == 0.0, 1.0, 0.0)
        return A / A.sum(), True
    weights = np.array([1.0 / interference_penalty(float(t), alpha) for t in taus])
    return weights / weights.sum(), False


def _start_pairs(config: NetworkConfig, opts: SolveOptions, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    K = config.num_tiers
    ef, _ = _equal_fractions_point(config)
    uniform = np.full(K, 1.0 / K)
    pairs = [(ef, ef.copy()), (uniform, uniform.copy())]
    rng = np.random.default_rng(seed)
    for _ in range(opts.restarts):
        pairs.append((rng.dirichlet(np.ones(K)), rng.dirichlet(np.ones(K))))
    return pairs


def optimize_joint(
    config: NetworkConfig,
    model: LoadModel = LoadModel.MEAN,
    opts: SolveOptions | None = None,
    seed: int = 0,
) -> SolveResult:
    """Maximize rate coverage over association and spectrum splits jointly.

    Multi-start projected gradient ascent: the closed-form equal-fractions
    point, the uniform pair, and ``opts.restarts`` random simplex pairs.
    The best end point wins; its objective is at least each start's.
    ``iterations`` counts ascent iterations over all starts.
    """
    opts = opts or SolveOptions()
    alpha = config.path_loss_exponent
    base, slope = _exponent_consts(config, model)
    use_relation = model is LoadModel.MEAN

    pairs = _start_pairs(config, opts, seed)
    best = None
    total_iters = 0
    for A0, w0 in pairs:
        A, w, val, iters, conv = _ascent(alpha, base, slope, A0, w0, opts, True, use_relation)
        total_iters += iters
        if best is None or val > best[2]:
            best = (A, w, val, conv)
    A, w, _, conv = best
    A, w = _snap_boundary(A, w, move_assoc=True)
    alloc = AllocationPair(A, w)
    return SolveResult(
        alloc=alloc,
        report=rate_coverage(config, alloc, model),
        converged=conv,
        iterations=total_iters,
        mode=SolveMode.JOINT,
    )


def optimize_equal_fractions(config: NetworkConfig, model: LoadModel = LoadModel.MEAN) -> SolveResult:
    """Closed-form optimum under the constraint assoc == spectrum.

    With equal splits the per-tier SIR threshold no longer depends on the
    split, so the objective separates and the optimal share of tier k is
    proportional to 1/penalty(tau_bar_k).  Only the MEAN load model keeps
    the threshold split-independent; HIGHER is rejected.
    """
    if model is not LoadModel.MEAN:
        raise ValueError("equal-fractions closed form requires the MEAN load model")
    A, degenerate = _equal_fractions_point(config)
    alloc = AllocationPair(A, A.copy())
    return SolveResult(
        alloc=alloc,
        report=rate_coverage(config, alloc, model),
        converged=True,
        iterations=0,
        mode=SolveMode.EQUAL_FRACTIONS,
        degenerate=degenerate,
    )


def optimize_spectrum_maxsir(
    config: NetworkConfig,
    model: LoadModel = LoadModel.MEAN,
    opts: SolveOptions | None = None,
    seed: int = 0,
) -> SolveResult:
    """Optimize the spectrum split with association fixed by strongest power.

    Requires all tier biases equal (strongest-power association is what an
    unbiased, max-SIR network does); the association split is then the
    closed-form probability vector and only the spectrum shares move.
    """
    biases = config.biases
    if np.max(np.abs(biases - biases[0])) > 1e-12 * biases[0]:
        raise ValueError("spectrum-only mode requires all tier biases equal")
    opts = opts or SolveOptions()
    alpha = config.path_loss_exponent
    base, slope = _exponent_consts(config, model)
    use_relation = model is LoadModel.MEAN
    A = association_probabilities(config)

    K = config.num_tiers
    starts = [A.copy(), np.full(K, 1.0 / K)]
    rng = np.random.default_rng(seed)
    for _ in range(opts.restarts):
        starts.append(rng.dirichlet(np.ones(K)))

    best = None
    total_iters = 0
    for w0 in starts:
        _, w, val, iters, conv = _ascent(alpha, base, slope, A, w0, opts, False, use_relation)
        total_iters += iters
        if best is None or val > best[1]:
            best = (w, val, conv)
    w, _, conv = best
    _, w = _snap_boundary(A, w, move_assoc=False)
    alloc = AllocationPair(A, w)
    return SolveResult(
        alloc=alloc,
        report=rate_coverage(config, alloc, model),
        converged=conv,
        iterations=total_iters,
        mode=SolveMode.MAX_SIR_SPECTRUM_ONLY,
    )


def _simplex_lattice(K: int, M: int) -> np.ndarray:
    """All K-tuples of nonnegative ints summing to M, lexicographically
    ascending."""
    if K == 1:
        return np.array([[M]], dtype=np.int32)
    blocks = []
    for a in range(M + 1):
        sub = _simplex_lattice(K - 1, M - a)
        blk = np.empty((sub.shape[0], K), dtype=np.int32)
        blk[:, 0] = a
        blk[:, 1:] = sub
        blocks.append(blk)
    return np.vstack(blocks)


def _tier_table(alpha: float, base_k: float, slope_k: float, M: int) -> np.ndarray:
    """Coverage term of one tier on the (assoc index, spectrum index) grid."""
    frac = np.arange(M + 1) / M
    demand = base_k + slope_k * frac
    exps = np.full((M + 1, M + 1), np.inf)
    np.divide(demand[:, None], frac[None, :], out=exps, where=frac[None, :] > 0)
    exps[demand == 0.0, :] = 0.0
    over = exps > EXP_CAP
    taus = np.expm1(np.minimum(exps, EXP_CAP) * _LN2)
    uniq, inv = np.unique(taus, return_inverse=True)
    pen = np.array([interference_penalty(float(t), alpha) if t > 0 else 0.0 for t in uniq])
    pens = pen[inv].reshape(taus.shape)
    table = frac[:, None] / (1.0 + frac[:, None] * pens)
    table[over] = 0.0
    return table


def brute_force(
    config: NetworkConfig,
    model: LoadModel = LoadModel.MEAN,
    grid_step: float = 0.01,
) -> SolveResult:
    """Exhaustive search over both simplex lattices at a given resolution.

    Enumerates every pair of lattice points whose coordinates are multiples
    of ``grid_step`` and sum to 1, and returns the best objective; ties are
    broken by the first point found in lexicographic enumeration order.
    Guard rails: at most 4 tiers, the step must divide 1, and the per-simplex
    lattice may not exceed 10^7 points.
    """
    K = config.num_tiers
    if K > 4:
        raise ValueError("lattice search supports at most 4 tiers")
    M = round(1.0 / grid_step)
    if M < 1 or abs(M * grid_step - 1.0) > 1e-9:
        raise ValueError("grid_step must evenly divide 1")
    n_points = math.comb(M + K - 1, K - 1)
    if n_points > _LATTICE_LIMIT:
        raise ValueError(f"lattice of {n_points} points exceeds the 1e7 guard")

    alpha = config.path_loss_exponent
    base, slope = _exponent_consts(config, model)
    lattice = _simplex_lattice(K, M)
    tables = [_tier_table(alpha, float(base[k]), float(slope[k]), M) for k in range(K)]

    # Column-gathered views: H[k][a, j] = value of tier k at assoc index a
    # and the spectrum index of lattice row j.  Falls back to chunked
    # gathering when the full views would be too large.
    n_rows = lattice.shape[0]
    budget = 600_000_000
    chunk = n_rows if K * (M + 1) * n_rows * 8 <= budget else max(budget // (K * (M + 1) * 8), 1024)

    best_val = -np.inf
    best_a = best_w = n_rows  # tie-break: smallest (assoc row, spectrum row) wins
    for lo in range(0, n_rows, chunk):
        hi = min(lo + chunk, n_rows)
        views = [tables[k][:, lattice[lo:hi, k]] for k in range(K)]
        for ai in range(n_rows):
            acc = views[0][lattice[ai, 0]].copy()
            for k in range(1, K):
                acc += views[k][lattice[ai, k]]
            j = int(np.argmax(acc))
            v = float(acc[j])
            if v > best_val or (v == best_val and (ai, lo + j) < (best_a, best_w)):
                best_val = v
                best_a = ai
                best_w = lo + j

    A = lattice[best_a].astype(float) / M
    w = lattice[best_w].astype(float) / M
    alloc = AllocationPair(A, w)
    return SolveResult(
        alloc=alloc,
        report=rate_coverage(config, alloc, model),
        converged=True,
        iterations=n_rows * n_rows,
        mode=SolveMode.BRUTE_FORCE,
    )
