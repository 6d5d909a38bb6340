"""Norms, the Matsumura-Nishida energy functional, and energy-budget reports.

Sobolev quantities are evaluated in Fourier space by Parseval. ``grad^k f``
denotes the full tensor of k-th derivatives (every ordered index tuple), so
``||grad^k f||^2 = sum |xi|^(2k) |f_hat(xi)|^2``; each derivative uses the
odd-order spectral symbol, i.e. the Nyquist mode is dropped, which makes these
values agree with quadrature of repeatedly differentiated fields.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import spectral as sp
from .errors import DegenerateSample
from .fields import REGIME_BOUND, Grid, PhysParams, State, check_vacuum

REPORT_COLUMNS = (
    "time", "mass", "l2_rho", "l2_u", "l2_theta", "h1", "h2", "h3",
    "triple0", "triple1", "triple2", "triple3", "e0", "diss_cum", "flag_regime",
)


def _hbar(params) -> float:
    return float(getattr(params, "hbar", params))


def _multiplicity(grid: Grid) -> np.ndarray:
    # real-FFT storage holds each interior last-axis mode once for a conjugate pair
    N = grid.N
    w = np.full(N // 2 + 1, 2.0)
    w[0] = 1.0
    w[-1] = 1.0
    return w


def _power(f: np.ndarray, grid: Grid) -> np.ndarray:
    """Per-mode contribution to ||f||^2 over the torus, summed over leading components."""
    ws = sp.workspace(grid)
    fh = ws.fft(f)
    p = np.abs(fh) ** 2
    if p.ndim > grid.dim:
        p = p.reshape((-1,) + p.shape[-grid.dim:]).sum(axis=0)
    return p * _multiplicity(grid) * (grid.volume / grid.N ** (2 * grid.dim))


def _kodd_sq(grid: Grid) -> np.ndarray:
    ws = sp.workspace(grid)
    return sum(k**2 for k in ws.kodd)


def derivative_energies(f: np.ndarray, grid: Grid, kmax: int) -> np.ndarray:
    """``[||grad^j f||^2 for j in 0..kmax]``."""
    p = _power(f, grid)
    ksq = _kodd_sq(grid)
    out = np.empty(kmax + 1)
    w = np.ones_like(ksq)
    for j in range(kmax + 1):
        out[j] = float(np.sum(p * w))
        w = w * ksq
    return out


def sobolev_seminorm(f: np.ndarray, order: int, grid: Grid, kind: str = "tensor") -> float:
    """``||grad^order f||`` for a scalar field (vector fields: summed over components).

    ``kind="multiindex"`` sums each distinct multi-index ``|alpha| = order`` once
    instead of every ordered tuple; the two agree in one dimension.
    """
    if not 0 <= order <= 5:
        raise ValueError("order must be between 0 and 5")
    if kind == "tensor":
        return float(np.sqrt(derivative_energies(f, grid, order)[order]))
    if kind != "multiindex":
        raise ValueError(f"unknown kind {kind!r}")
    p = _power(f, grid)
    ws = sp.workspace(grid)
    total = 0.0
    for alpha in itertools.product(range(order + 1), repeat=grid.dim):
        if sum(alpha) != order:
            continue
        w = np.ones(ws.spectral_shape)
        for kj, a in zip(ws.kodd, alpha):
            w = w * kj ** (2 * a)
        total += float(np.sum(p * w))
    return float(np.sqrt(total))


def l2_norm(f: np.ndarray, grid: Grid) -> float:
    return float(np.sqrt(grid.integrate(f**2)))


def hk_norm(f: np.ndarray, grid: Grid, k: int) -> float:
    """``(sum_{j<=k} ||grad^j f||^2)^(1/2)``."""
    return float(np.sqrt(derivative_energies(f, grid, k).sum()))


def triple_norm_sq(state: State, params, k: int) -> float:
    if not 0 <= k <= 3:
        raise ValueError("k must be between 0 and 3")
    hb = _hbar(params)
    g = state.grid
    R = derivative_energies(state.rho, g, k + 2)
    U = derivative_energies(state.u, g, k + 1)
    T = derivative_energies(state.theta, g, k)
    total = 0.0
    for j in range(k + 1):
        total += (
            R[j] + U[j] + T[j]
            + R[j + 1]
            + hb**2 * (R[j + 1] + U[j + 1])
            + hb**4 * R[j + 2]
        )
    return float(total)


def triple_norm(state: State, params, k: int) -> float:
    """The hbar-weighted norm ``|||(rho, u, theta)|||_k``.

    ``|||.|||_0^2 = ||(rho,u,theta)||^2 + ||grad rho||^2 + ||(hbar grad rho, hbar grad u)||^2
    + ||hbar^2 lap rho||^2`` and each higher level adds ``|||grad^k(rho,u,theta)|||_0^2``.
    """
    return float(np.sqrt(triple_norm_sq(state, params, k)))


def entropy_s(rho: np.ndarray, theta: np.ndarray) -> np.ndarray:
    n = check_vacuum(rho)
    return (1.0 + theta) / n ** (2.0 / 3.0) - 1.0


def theta_from_entropy(rho: np.ndarray, s: np.ndarray) -> np.ndarray:
    return (1.0 + s) * (1.0 + rho) ** (2.0 / 3.0) - 1.0


def e0_density(rho, u, theta, R: float = PhysParams.R):
    """Pointwise energy density E0(rho, u, s); ``u`` has the component axis first."""
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    n = check_vacuum(rho)
    # expm1/log1p keep the O(rho^2) cancellations accurate near the equilibrium
    logn = np.log1p(rho)
    s = np.expm1(np.log1p(theta) - 2.0 / 3.0 * logn)
    usq = np.sum(np.asarray(u, dtype=float) ** 2, axis=0)
    return (
        1.5 * R * (1.0 + s) * (np.expm1(5.0 / 3.0 * logn) - 5.0 * rho / 3.0)
        + 0.5 * n * usq
        + R * s * rho
        + 0.75 * R * n * s**2
    )


def energy_e0(state: State) -> tuple[float, np.ndarray]:
    dens = e0_density(state.rho, state.u, state.theta)
    return state.grid.integrate(dens), dens


def energy_ratio_bounds(
    n_samples: int,
    rho_bound: float = 0.1,
    theta_bound: float | None = None,
    u_bound: float | None = None,
    *,
    slice: str | None = None,
    ncomp: int = 3,
    seed: int = 0,
) -> tuple[float, float]:
    """Sampled inf/sup of ``E0 / (rho^2 + |u|^2 + theta^2)`` over random pointwise states.

    ``slice`` restricts the sample to one variable (``"rho"``, ``"u"`` or ``"theta"``).
    """
    if rho_bound > 0.5:
        raise ValueError("rho_bound must be at most 1/2")
    theta_bound = rho_bound if theta_bound is None else theta_bound
    u_bound = rho_bound if u_bound is None else u_bound
    rng = np.random.default_rng(seed)
    rho = rng.uniform(-rho_bound, rho_bound, n_samples)
    theta = rng.uniform(-theta_bound, theta_bound, n_samples)
    u = rng.uniform(-u_bound, u_bound, (ncomp, n_samples))
    if slice == "u":
        rho[:] = 0.0
        theta[:] = 0.0
    elif slice == "rho":
        u[:] = 0.0
        theta[:] = 0.0
    elif slice == "theta":
        rho[:] = 0.0
        u[:] = 0.0
    elif slice is not None:
        raise ValueError(f"unknown slice {slice!r}")
    q = rho**2 + np.sum(u**2, axis=0) + theta**2
    keep = q > 0
    if not keep.any():
        raise DegenerateSample("every sampled state is the zero state")
    ratio = e0_density(rho[keep], u[:, keep], theta[keep]) / q[keep]
    return float(ratio.min()), float(ratio.max())


@dataclass
class EnergyReport:
    time: np.ndarray
    mass: np.ndarray
    l2_rho: np.ndarray
    l2_u: np.ndarray
    l2_theta: np.ndarray
    seminorms: np.ndarray  # (nsnap, 3): orders 1..3 of (rho, u, theta)
    triple: np.ndarray  # (nsnap, 4): |||.|||_0 .. |||.|||_3
    e0: np.ndarray
    diss_rate: np.ndarray
    diss_cum: np.ndarray
    diss_grad_cum: np.ndarray
    diss_hbar_cum: np.ndarray
    max_rho: np.ndarray
    max_theta: np.ndarray
    nu: float = 0.0
    C: float = 4.0
    extra: dict = field(default_factory=dict)

    @property
    def flag_regime(self) -> np.ndarray:
        """1 where the state has left ``max|rho|, max|theta| <= 1/2``."""
        return ((self.max_rho > REGIME_BOUND) | (self.max_theta > REGIME_BOUND)).astype(int)

    @property
    def bound_lhs(self) -> np.ndarray:
        return self.triple[:, 3] ** 2 + self.nu * self.diss_cum

    @property
    def bound_holds(self) -> bool:
        """Whether ``|||.|||_3^2(t) + nu D(t) <= C |||.|||_3^2(0)`` at every snapshot."""
        rhs = self.C * self.triple[0, 3] ** 2
        return bool(np.all(self.bound_lhs <= rhs * (1 + 1e-12) + 1e-300))

    @property
    def nu_fit(self) -> float:
        """Largest dissipation weight for which the bound holds with the configured C."""
        slack = self.C * self.triple[0, 3] ** 2 - self.triple[:, 3] ** 2
        pos = self.diss_cum > 0
        if not pos.any():
            return float("inf")
        return float(max(0.0, np.min(slack[pos] / self.diss_cum[pos])))

    def rows(self):
        flags = self.flag_regime
        for i in range(len(self.time)):
            yield [
                self.time[i], self.mass[i], self.l2_rho[i], self.l2_u[i], self.l2_theta[i],
                *self.seminorms[i], *self.triple[i], self.e0[i], self.diss_cum[i], int(flags[i]),
            ]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(REPORT_COLUMNS)
            for row in self.rows():
                w.writerow([repr(float(v)) if not isinstance(v, int) else v for v in row])


def snapshot_diagnostics(state: State, params) -> dict:
    hb = _hbar(params)
    g = state.grid
    R = derivative_energies(state.rho, g, 5)
    U = derivative_energies(state.u, g, 5)
    T = derivative_energies(state.theta, g, 4)
    triple = [np.sqrt(triple_norm_sq(state, hb, k)) for k in range(4)]
    diss = sum(R[k] + U[k] + T[k] + hb**2 * (U[k + 1] + R[k + 1]) for k in range(1, 5))
    return dict(
        time=state.time,
        mass=state.mass(),
        l2_rho=np.sqrt(R[0]),
        l2_u=np.sqrt(U[0]),
        l2_theta=np.sqrt(T[0]),
        seminorms=[np.sqrt(R[j] + U[j] + T[j]) for j in (1, 2, 3)],
        triple=triple,
        e0=energy_e0(state)[0],
        diss_rate=diss,
        diss_grad=R[1] + U[1] + T[1],
        diss_hbar=hb**2 * (R[2] + U[2]),
        max_rho=float(np.abs(state.rho).max()),
        max_theta=float(np.abs(state.theta).max()),
    )


def energy_budget(trajectory, params, nu: float = 0.0, C: float = 4.0) -> EnergyReport:
    """Norm history and trapezoid-rule dissipation integrals over a trajectory's snapshots."""
    states = list(getattr(trajectory, "states", trajectory))
    if len(states) < 2:
        raise ValueError("energy_budget needs at least two snapshots")
    recs = [snapshot_diagnostics(s, params) for s in states]
    col = lambda key: np.array([r[key] for r in recs], dtype=float)  # noqa: E731
    t = col("time")
    return EnergyReport(
        time=t,
        mass=col("mass"),
        l2_rho=col("l2_rho"),
        l2_u=col("l2_u"),
        l2_theta=col("l2_theta"),
        seminorms=col("seminorms"),
        triple=col("triple"),
        e0=col("e0"),
        diss_rate=col("diss_rate"),
        diss_cum=cumulative_trapezoid(col("diss_rate"), t, initial=0.0),
        diss_grad_cum=cumulative_trapezoid(col("diss_grad"), t, initial=0.0),
        diss_hbar_cum=cumulative_trapezoid(col("diss_hbar"), t, initial=0.0),
        max_rho=col("max_rho"),
        max_theta=col("max_theta"),
        nu=nu,
        C=C,
    )
