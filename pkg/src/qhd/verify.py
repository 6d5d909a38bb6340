"""Operator and identity property suite behind ``qhd verify-ops``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spectral as sp
from .diagnostics import e0_density, entropy_s, energy_ratio_bounds, theta_from_entropy
from .dynamics import bohm_force, bohm_force_conservative, rhs_classical, rhs_quantum, stress_tensor
from .fields import Grid, PhysParams, State, make_grid


@dataclass
class Check:
    name: str
    value: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.tol)


def _rel(a, b) -> float:
    scale = max(float(np.sqrt(np.mean(b**2))), 1e-300)
    return float(np.sqrt(np.mean((a - b) ** 2)) / scale)


def random_state(grid: Grid, rng: np.random.Generator, amp: float = 0.1, kmax: int | None = None) -> State:
    kmax = min(4, grid.cutoff) if kmax is None else kmax
    return State(
        grid,
        sp.random_field(grid, rng, amp, kmax),
        sp.random_field(grid, rng, amp, kmax, ncomp=grid.dim),
        sp.random_field(grid, rng, amp, kmax),
    )


def _trig_monomial_errors(grid: Grid) -> float:
    """Max error of every operator against its analytic action on sin/cos monomials below cutoff."""
    xs = grid.coords()
    scale = 2 * np.pi / grid.L
    worst = 0.0
    for m in range(0, grid.cutoff + 1):
        for j in range(grid.dim):
            k = scale * m
            ph = k * xs[j]
            f = np.sin(ph) + np.cos(ph)
            df = k * (np.cos(ph) - np.sin(ph))
            g = sp.grad(f, grid)
            worst = max(worst, np.abs(g[j] - df).max())
            worst = max(worst, np.abs(sp.laplacian(f, grid) + k**2 * f).max() / max(1.0, k**2))
            worst = max(worst, np.abs(sp.laplacian_grad(f, grid)[j] + k**2 * df).max() / max(1.0, k**3))
            H = sp.hessian(f, grid)
            worst = max(worst, np.abs(H[j, j] + k**2 * f).max() / max(1.0, k**2))
            v = np.zeros((grid.dim,) + grid.shape)
            v[j] = f
            worst = max(worst, np.abs(sp.divergence(v, grid) - df).max())
            worst = max(worst, np.abs(sp.grad_div(v, grid)[j] + k**2 * f).max() / max(1.0, k**2))
    return float(worst)


def run_checks(grid: Grid | None = None, seed: int = 0) -> list[Check]:
    grid = grid or make_grid(1, 2 * np.pi, 32)
    rng = np.random.default_rng(seed)
    checks = []
    checks.append(Check("operators_vs_analytic", _trig_monomial_errors(grid), 1e-10))

    f = sp.random_field(grid, rng)
    lhs = float(np.sum(f**2))
    checks.append(Check("parseval", abs(lhs - sp.energy_spectrum_sum(f, grid)) / lhs, 1e-12))
    checks.append(Check("laplacian_eq_div_grad", float(np.abs(sp.laplacian(f, grid) - sp.divergence(sp.grad(f, grid), grid)).max()
                                                      / np.abs(sp.laplacian(f, grid)).max()), 1e-12))
    v = sp.random_field(grid, rng, ncomp=grid.dim)
    gd = sp.grad_div(v, grid)
    checks.append(Check("grad_div_composition", float(np.abs(gd - sp.grad(sp.divergence(v, grid), grid)).max() / np.abs(gd).max()), 1e-12))
    once = sp.dealias(f, grid)
    checks.append(Check("dealias_idempotent", float(np.abs(sp.dealias(once, grid) - once).max()), 1e-14))

    S = stress_tensor(0.1 * v, grid, 1.0, 0.3)
    checks.append(Check("stress_symmetric", float(np.abs(S - S.swapaxes(0, 1)).max()), 1e-14))

    worst = 0.0
    for N in (32, 64):
        g = make_grid(grid.dim, grid.L, N)
        rho = sp.random_field(g, rng, 0.3, kmax=1)
        worst = max(worst, _rel(bohm_force(rho, 1.0, g), bohm_force_conservative(rho, 1.0, g)))
    checks.append(Check("bohm_dual_form", worst, 1e-8))

    worst = 0.0
    for _ in range(20):
        st = random_state(grid, rng)
        p = PhysParams(0.0, float(rng.uniform(0.1, 2)), float(rng.uniform(-0.05, 1)), float(rng.uniform(0.1, 2)))
        a, b = rhs_quantum(st, p), rhs_classical(st, p)
        worst = max(worst, float(np.abs(a.d_rho - b.d_rho).max()), float(np.abs(a.d_u - b.d_u).max()),
                    float(np.abs(a.d_theta - b.d_theta).max()))
    checks.append(Check("classical_reduction", worst, 1e-14))

    worst = 0.0
    for _ in range(20):
        p = PhysParams(float(rng.uniform(0, 1)), float(rng.uniform(0.1, 2)), float(rng.uniform(-0.05, 1)), float(rng.uniform(0.1, 2)))
        worst = max(worst, rhs_quantum(State.zeros(grid), p).max_abs())
    checks.append(Check("equilibrium_fixed_point", worst, 0.0))

    st = random_state(grid, rng)
    r = rhs_quantum(st, PhysParams(0.1))
    checks.append(Check("continuity_mean_zero", abs(float(r.d_rho.mean())), 1e-12))

    rho = rng.uniform(-0.1, 0.1, 1000)
    th = rng.uniform(-0.1, 0.1, 1000)
    checks.append(Check("entropy_round_trip", float(np.abs(theta_from_entropy(rho, entropy_s(rho, th)) - th).max()), 1e-12))
    lo, hi = energy_ratio_bounds(10_000, 0.1, slice="u")
    checks.append(Check("e0_u_slice_half", max(abs(lo - 0.5), abs(hi - 0.5)), 0.0))
    lo, hi = energy_ratio_bounds(10_000, 0.1)
    checks.append(Check("e0_positive_definite", 0.0 if 0 < lo <= hi < np.inf else 1.0, 0.0))
    zero = e0_density(np.zeros(3), np.zeros((3, 3)), np.zeros(3))
    checks.append(Check("e0_zero_at_equilibrium", float(np.abs(zero).max()), 0.0))
    return checks


def format_table(checks: list[Check]) -> str:
    width = max(len(c.name) for c in checks)
    lines = [f"{'check'.ljust(width)}  {'value':>11}  {'tol':>8}  result"]
    for c in checks:
        lines.append(f"{c.name.ljust(width)}  {c.value:11.3e}  {c.tol:8.1e}  {'PASS' if c.passed else 'FAIL'}")
    return "\n".join(lines)
