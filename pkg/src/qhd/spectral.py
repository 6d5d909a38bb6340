"""Fourier-spectral derivatives and 2/3-rule dealiasing on the periodic grid.

All operators act on the trailing ``grid.dim`` axes, so a vector field of
shape ``(dim, N, ...)`` is handled componentwise wherever that makes sense.
First (and other odd-order) derivatives drop the Nyquist mode; even-order
symbols keep it.
"""

from __future__ import annotations

import os
from functools import lru_cache

import numpy as np
import scipy.fft as sfft

from .fields import Grid


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("QHD_THREADS", "1")))
    except ValueError:
        return 1


class SpectralWorkspace:
    """Wavenumber arrays in the real-FFT layout for one grid, plus the dealias mask."""

    def __init__(self, grid: Grid):
        self.grid = grid
        d, N = grid.dim, grid.N
        scale = 2 * np.pi / grid.L
        full = np.fft.fftfreq(N, d=1.0 / N)
        half = np.fft.rfftfreq(N, d=1.0 / N)
        self.spectral_shape = (N,) * (d - 1) + (N // 2 + 1,)
        idx, k, kodd = [], [], []
        for j in range(d):
            m = half if j == d - 1 else full
            shape = [1] * d
            shape[j] = m.size
            m = m.reshape(shape)
            idx.append(m)
            k.append(scale * m)
            kodd.append(np.where(np.abs(m) == N // 2, 0.0, scale * m))
        self.index = idx
        self.k = k
        self.kodd = kodd
        self.ksq = sum(kj**2 for kj in k)
        keep = np.ones(self.spectral_shape, dtype=bool)
        for m in idx:
            keep = keep & (np.abs(m) <= grid.cutoff)
        self.mask = keep
        self.axes = tuple(range(-d, 0))

    def fft(self, f: np.ndarray) -> np.ndarray:
        return sfft.rfftn(f, axes=self.axes, workers=_workers())

    def ifft(self, fh: np.ndarray) -> np.ndarray:
        return sfft.irfftn(fh, s=self.grid.shape, axes=self.axes, workers=_workers())

    # derivatives of already-transformed data
    def d_hat(self, fh: np.ndarray, j: int) -> np.ndarray:
        return 1j * self.kodd[j] * fh

    def grad_hat(self, fh: np.ndarray) -> np.ndarray:
        return np.stack([1j * kj * fh for kj in self.kodd])

    def div_hat(self, vh: np.ndarray) -> np.ndarray:
        return sum(1j * self.kodd[j] * vh[j] for j in range(self.grid.dim))


@lru_cache(maxsize=32)
def workspace(grid: Grid) -> SpectralWorkspace:
    return SpectralWorkspace(grid)


def grad(f: np.ndarray, grid: Grid) -> np.ndarray:
    ws = workspace(grid)
    return ws.ifft(ws.grad_hat(ws.fft(f)))


def partial(f: np.ndarray, grid: Grid, j: int) -> np.ndarray:
    ws = workspace(grid)
    return ws.ifft(ws.d_hat(ws.fft(f), j))


def divergence(v: np.ndarray, grid: Grid) -> np.ndarray:
    ws = workspace(grid)
    return ws.ifft(ws.div_hat(ws.fft(v)))


def laplacian(f: np.ndarray, grid: Grid) -> np.ndarray:
    """Laplacian of a scalar, or componentwise of a vector/tensor field."""
    ws = workspace(grid)
    return ws.ifft(-ws.ksq * ws.fft(f))


def grad_div(v: np.ndarray, grid: Grid) -> np.ndarray:
    ws = workspace(grid)
    return ws.ifft(ws.grad_hat(ws.div_hat(ws.fft(v))))


def hessian(f: np.ndarray, grid: Grid) -> np.ndarray:
    ws = workspace(grid)
    fh = ws.fft(f)
    d = grid.dim
    out = np.empty((d, d) + grid.shape)
    for i in range(d):
        out[i, i] = ws.ifft(-ws.k[i] ** 2 * fh)
        for j in range(i + 1, d):
            out[i, j] = out[j, i] = ws.ifft(-ws.kodd[i] * ws.kodd[j] * fh)
    return out


def laplacian_grad(f: np.ndarray, grid: Grid) -> np.ndarray:
    """grad(laplacian(f)) with a single forward/inverse transform pair."""
    ws = workspace(grid)
    return ws.ifft(ws.grad_hat(-ws.ksq * ws.fft(f)))


def vector_gradient(v: np.ndarray, grid: Grid) -> np.ndarray:
    """Velocity gradient ``G[i, j] = d_j v_i``."""
    ws = workspace(grid)
    vh = ws.fft(v)
    return ws.ifft(np.stack([ws.grad_hat(vh[i]) for i in range(grid.dim)]))


def dealias(f: np.ndarray, grid: Grid) -> np.ndarray:
    ws = workspace(grid)
    return ws.ifft(ws.mask * ws.fft(f))


def energy_spectrum_sum(f: np.ndarray, grid: Grid) -> float:
    """Parseval: grid sum of f**2 computed from the full complex DFT."""
    fh = np.fft.fftn(f, axes=tuple(range(-grid.dim, 0)))
    return float(np.sum(np.abs(fh) ** 2) / grid.N**grid.dim)


def random_field(grid: Grid, rng: np.random.Generator, amp: float = 1.0, kmax: int | None = None,
                 ncomp: int | None = None) -> np.ndarray:
    """Random real trigonometric polynomial with all mode indices ``|m_j| <= kmax``.

    ``kmax`` defaults to the dealiasing cutoff; the result is scaled to max-norm ``amp``.
    """
    ws = workspace(grid)
    kmax = grid.cutoff if kmax is None else kmax
    lead = () if ncomp is None else (ncomp,)
    coef = rng.standard_normal(lead + ws.spectral_shape) + 1j * rng.standard_normal(lead + ws.spectral_shape)
    keep = np.ones(ws.spectral_shape, dtype=bool)
    for m in ws.index:
        keep = keep & (np.abs(m) <= kmax)
    f = ws.ifft(coef * keep)
    return amp * f / np.abs(f).max()
