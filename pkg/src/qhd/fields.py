"""Periodic grid, solution state and physical parameters.

Fields are plain numpy arrays laid out as

* scalar: ``(N,) * dim``
* vector: ``(dim,) + (N,) * dim``
* tensor: ``(dim, dim) + (N,) * dim``

on the torus ``[0, L)^dim`` sampled at ``x_j = j L / N``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from .errors import InsufficientResolution, InvalidParams, OddResolution, VacuumApproach

VACUUM_FLOOR = 0.1
REGIME_BOUND = 0.5


@dataclass(frozen=True)
class Grid:
    dim: int
    L: float
    N: int
    k: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise InvalidParams(f"dim must be 1, 2 or 3, got {self.dim}")
        if not self.L > 0:
            raise InvalidParams(f"L must be positive, got {self.L}")
        if self.N % 2:
            raise OddResolution(f"N must be even, got {self.N}")
        if self.N < 8:
            raise InsufficientResolution(f"N must be at least 8, got {self.N}")
        kk = 2 * np.pi / self.L * np.fft.fftfreq(self.N, d=1.0 / self.N)
        object.__setattr__(self, "k", tuple(kk.copy() for _ in range(self.dim)))

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.dim

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def cell_volume(self) -> float:
        return self.h**self.dim

    @property
    def volume(self) -> float:
        return self.L**self.dim

    @property
    def cutoff(self) -> int:
        """Largest mode index kept by the 2/3 rule (3 * cutoff < N, so products never alias back)."""
        return (self.N - 1) // 3

    @property
    def nyquist_index(self) -> int:
        return self.N // 2

    def coords(self) -> list[np.ndarray]:
        x = np.arange(self.N) * self.h
        return list(np.meshgrid(*([x] * self.dim), indexing="ij"))

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)

    def zeros_vector(self) -> np.ndarray:
        return np.zeros((self.dim,) + self.shape)

    def integrate(self, f: np.ndarray) -> float:
        """Rectangle-rule integral over the torus (spectrally exact for band-limited f)."""
        return float(np.sum(f) * self.cell_volume)


def make_grid(dim: int, L: float, N: int) -> Grid:
    return Grid(int(dim), float(L), int(N))


@dataclass(frozen=True)
class PhysParams:
    hbar: float = 0.0
    mu: float = 1.0
    lam: float = 0.0
    kappa: float = 1.0

    m: ClassVar[float] = 1.0
    gamma: ClassVar[float] = 5.0 / 3.0
    R: ClassVar[float] = 1.0

    def __post_init__(self):
        if self.hbar < 0:
            raise InvalidParams("hbar must be nonnegative")
        if self.mu <= 0:
            raise InvalidParams("mu must be positive")
        if self.kappa <= 0:
            raise InvalidParams("kappa must be positive")
        if 2 * self.mu + 3 * self.lam <= 0:
            raise InvalidParams("need 2*mu + 3*lambda > 0")

    @property
    def classical(self) -> bool:
        return self.hbar == 0

    def with_hbar(self, hbar: float) -> "PhysParams":
        return dataclasses.replace(self, hbar=float(hbar))


@dataclass(frozen=True)
class State:
    """Perturbation unknowns ``(rho, u, theta) = (n - 1, u, T - 1)`` at ``time``."""

    grid: Grid
    rho: np.ndarray
    u: np.ndarray
    theta: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        g = self.grid
        if self.rho.shape != g.shape or self.theta.shape != g.shape:
            raise ValueError("scalar field shape does not match grid")
        if self.u.shape != (g.dim,) + g.shape:
            raise ValueError("velocity shape does not match grid")

    @classmethod
    def zeros(cls, grid: Grid, time: float = 0.0) -> "State":
        return cls(grid, grid.zeros(), grid.zeros_vector(), grid.zeros(), time)

    def replace(self, **kw) -> "State":
        return dataclasses.replace(self, **kw)

    def is_finite(self) -> bool:
        return bool(
            np.isfinite(self.rho).all() and np.isfinite(self.u).all() and np.isfinite(self.theta).all()
        )

    def min_density(self) -> float:
        return float(1.0 + self.rho.min())

    def mass(self) -> float:
        """Integral of the density perturbation rho."""
        return self.grid.integrate(self.rho)

    def in_regime(self) -> bool:
        return bool(np.abs(self.rho).max() <= REGIME_BOUND and np.abs(self.theta).max() <= REGIME_BOUND)


def check_vacuum(rho: np.ndarray, floor: float = VACUUM_FLOOR) -> np.ndarray:
    """Return ``1 + rho`` after checking it stays above the vacuum floor."""
    n = 1.0 + rho
    nmin = n.min()
    if not nmin > floor:
        raise VacuumApproach(f"min(1 + rho) = {nmin:.4g} <= vacuum floor {floor}")
    return n
