"""
The interference penalty kernel
===============================

The whole analytic model funnels through one special function: the expected
interference cost of demanding SIR threshold tau under path-loss exponent
alpha.  This script plots it across six decades of tau, overlays the
elementary closed form that exists at alpha = 4, and shows the derivative
identity used by the gradient code.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from hetcov import interference_penalty, interference_penalty_deriv

taus = np.logspace(-3, 3, 400)
alphas = [2.5, 3.0, 3.5, 4.0, 5.0]

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.2))

for alpha in alphas:
    vals = [interference_penalty(float(t), alpha) for t in taus]
    ax1.loglog(taus, vals, label=f"alpha = {alpha}")

# alpha = 4 collapses to sqrt(tau)*arctan(sqrt(tau))
closed = np.sqrt(taus) * np.arctan(np.sqrt(taus))
ax1.loglog(taus, closed, "k:", lw=2.5, label="closed form, alpha = 4")
ax1.set_xlabel("SIR threshold tau")
ax1.set_ylabel("penalty")
ax1.set_title("Interference penalty")
ax1.legend(fontsize=8)

# derivative vs a central finite difference
alpha = 3.5
deriv = np.array([interference_penalty_deriv(float(t), alpha) for t in taus])
h = 1e-6 * taus
fd = np.array(
    [
        (interference_penalty(float(t + e), alpha) - interference_penalty(float(t - e), alpha))
        / (2 * e)
        for t, e in zip(taus, h)
    ]
)
ax2.loglog(taus, deriv, label="analytic derivative")
ax2.loglog(taus, fd, "x", ms=3, markevery=25, label="finite difference")
ax2.set_xlabel("SIR threshold tau")
ax2.set_title(f"Derivative identity, alpha = {alpha}")
ax2.legend(fontsize=8)

fig.tight_layout()
fig.savefig("penalty_kernel.png", dpi=130)
print("wrote penalty_kernel.png")

# small-threshold behaviour is linear with slope 2/(alpha-2)
for alpha in alphas:
    ratio = interference_penalty(1e-8, alpha) / 1e-8
    print(f"alpha={alpha}: penalty/tau -> {ratio:.6f}  (2/(alpha-2) = {2/(alpha-2):.6f})")
