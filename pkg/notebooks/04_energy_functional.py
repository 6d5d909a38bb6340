# %% [markdown]
# # The entropy-based energy density
#
# E0 is positive definite near equilibrium and comparable to the plain
# quadratic form rho^2 + |u|^2 + theta^2. Sampling the ratio shows the
# equivalence constants.

# %%
import numpy as np

from qhd.diagnostics import e0_density, energy_ratio_bounds

lo, hi = energy_ratio_bounds(10_000, 0.1)
print(f"ratio over random states: [{lo:.4f}, {hi:.4f}]")

# %% [markdown]
# Along coordinate slices the ratio tends to 1/2 (density and velocity) and 3/4 (temperature).

# %%
for s in ("rho", "u", "theta"):
    print(s, energy_ratio_bounds(2000, 1e-3, slice=s))

# %%
r = np.array([-0.1, -0.05, 0.05, 0.1])
print(e0_density(r, np.zeros((1, 4)), np.zeros(4)) / r**2)
