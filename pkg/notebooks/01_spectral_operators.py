# %% [markdown]
# # Spectral operators on the periodic grid
#
# Derivatives are computed in Fourier space. For a trigonometric polynomial
# below the dealiasing cutoff they are exact up to roundoff.

# %%
import numpy as np

from qhd import spectral as sp
from qhd.fields import make_grid

grid = make_grid(2, 2 * np.pi, 32)
x, y = grid.coords()
f = np.sin(3 * x) * np.cos(2 * y)

# %% [markdown]
# Gradient and Laplacian against their closed forms.

# %%
g = sp.grad(f, grid)
print("d/dx error:", np.abs(g[0] - 3 * np.cos(3 * x) * np.cos(2 * y)).max())
print("laplacian error:", np.abs(sp.laplacian(f, grid) + 13 * f).max())

# %% [markdown]
# The 2/3 rule keeps modes with |m| <= (N-1)//3 on every axis.
# A product of two band-limited fields creates higher modes, which dealiasing removes.

# %%
print("cutoff:", grid.cutoff)
prod = np.sin(9 * x) * np.sin(9 * y) * f
ws = sp.workspace(grid)
kept = np.abs(ws.fft(sp.dealias(prod, grid))) > 1e-10
mx = np.abs(np.broadcast_to(ws.index[0], kept.shape))[kept].max()
my = np.abs(np.broadcast_to(ws.index[1], kept.shape))[kept].max()
print("largest surviving mode indices:", mx, my)

# %% [markdown]
# Parseval: the grid sum of f^2 equals the spectral energy.

# %%
print(np.sum(f**2), sp.energy_spectrum_sum(f, grid))
