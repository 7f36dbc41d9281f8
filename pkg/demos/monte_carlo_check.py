"""
Monte Carlo cross-check
=======================

Drop users into sampled networks and verify two analytic predictions: the
rate-coverage value at the equal-fractions optimum, and the distribution of
the distance to the serving AP.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from hetcov import (
    SimConfig,
    analytic_distance_cdf,
    biases_for_association,
    optimize_equal_fractions,
    reference_threetier,
    simulate_assoc_distance,
    simulate_coverage,
)

cfg = reference_threetier()
ef = optimize_equal_fractions(cfg)

# the simulator needs biases that realize the optimizer's association split
biased = cfg.with_biases(biases_for_association(cfg, ef.alloc.assoc))

out = simulate_coverage(biased, ef.alloc, SimConfig(num_drops=20000, seed=1), threads=4)
print(f"analytic coverage : {ef.report.objective:.4f}")
print(f"simulated coverage: {out.coverage_estimate:.4f} +/- {out.std_error:.4f}")
print(f"per-tier association, simulated: {np.round(out.per_tier_assoc_empirical, 4)}")
print(f"per-tier association, analytic : {np.round(ef.alloc.assoc, 4)}")

# serving-distance law for the pico tier (unit biases here)
distances = simulate_assoc_distance(cfg, SimConfig(num_drops=20000, seed=2), tier=2)
grid = np.linspace(0, distances.max(), 300)
cdf = analytic_distance_cdf(cfg, tier=2)

fig, ax = plt.subplots(figsize=(6.0, 4.2))
ax.plot(np.sort(distances), np.arange(1, distances.size + 1) / distances.size,
        lw=1, label="empirical")
ax.plot(grid, cdf(grid), "--", label="analytic")
ax.set_xlabel("distance to serving pico AP (m)")
ax.set_ylabel("CDF")
ax.legend()
fig.tight_layout()
fig.savefig("serving_distance_cdf.png", dpi=130)
print("wrote serving_distance_cdf.png")
