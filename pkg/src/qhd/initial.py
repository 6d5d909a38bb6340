"""Smooth, small initial data built from a few Fourier modes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diagnostics import triple_norm
from .errors import ModeAboveCutoff
from .fields import Grid, State

FIELDS = ("rho", "u0", "u1", "u2", "theta")


@dataclass(frozen=True)
class Mode:
    """``amp * sin(2 pi k.x / L + phase)`` added to one field."""

    field: str
    k: tuple
    amp: float = 1.0
    phase: float = 0.0

    def __post_init__(self):
        if self.field not in FIELDS:
            raise ValueError(f"unknown field {self.field!r}; expected one of {FIELDS}")
        object.__setattr__(self, "k", tuple(int(v) for v in np.atleast_1d(self.k)))


def default_modes() -> list[Mode]:
    return [
        Mode("rho", (1,), 1.0),
        Mode("u0", (1,), 0.5, np.pi / 2),
        Mode("theta", (2,), 0.5),
    ]


@dataclass(frozen=True)
class InitialSpec:
    """Mode list scaled by ``eps``.

    With ``normalize=True`` the assembled data are rescaled so that
    ``|||(rho, u, theta)(0)|||_3 == eps`` (using the run's hbar); otherwise each
    field is ``eps * sum(amp * sin(...))`` as written.
    """

    eps: float = 0.01
    modes: tuple = field(default_factory=lambda: tuple(default_modes()))
    normalize: bool = True
    rho_mean: float = 0.0


def random_modes(dim: int, count: int, seed: int, kmax: int = 3) -> list[Mode]:
    rng = np.random.default_rng(seed)
    names = ["rho", *[f"u{i}" for i in range(dim)], "theta"]
    out = []
    for _ in range(count):
        k = tuple(int(v) for v in rng.integers(-kmax, kmax + 1, dim))
        if not any(k):
            k = (1,) + (0,) * (dim - 1)
        out.append(Mode(str(rng.choice(names)), k, float(rng.uniform(0.2, 1.0)), float(rng.uniform(0, 2 * np.pi))))
    return out


def _mode_field(grid: Grid, mode: Mode) -> np.ndarray:
    k = mode.k + (0,) * (grid.dim - len(mode.k))
    if len(k) > grid.dim and any(k[grid.dim:]):
        raise ValueError(f"mode {mode} has components beyond dim={grid.dim}")
    k = k[: grid.dim]
    if any(abs(kj) > grid.cutoff for kj in k):
        raise ModeAboveCutoff(f"mode index {k} exceeds the 2/3 cutoff {grid.cutoff} for N={grid.N}")
    phase = sum(2 * np.pi * kj * x / grid.L for kj, x in zip(k, grid.coords()))
    return mode.amp * np.sin(phase + mode.phase)


def initial_state(grid: Grid, spec: InitialSpec, hbar: float = 0.0) -> State:
    if spec.eps < 0:
        raise ValueError("eps must be nonnegative")
    rho = grid.zeros()
    u = grid.zeros_vector()
    theta = grid.zeros()
    for mode in spec.modes:
        f = _mode_field(grid, mode)
        if mode.field == "rho":
            rho += f
        elif mode.field == "theta":
            theta += f
        else:
            comp = int(mode.field[1])
            if comp >= grid.dim:
                raise ValueError(f"mode on {mode.field} but dim={grid.dim}")
            u[comp] += f
    state = State(grid, rho, u, theta, 0.0)
    scale = spec.eps
    if spec.normalize and spec.eps > 0:
        base = triple_norm(state, hbar, 3)
        if base > 0:
            scale = spec.eps / base
    state = State(grid, scale * rho + spec.rho_mean, scale * u, scale * theta, 0.0)
    return state
