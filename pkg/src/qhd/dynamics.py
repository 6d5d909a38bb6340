"""Right-hand sides of the viscous, heat-conducting quantum hydrodynamic system.

The unknowns are the perturbations ``rho = n - 1``, ``u`` and ``theta = T - 1``
of the constant state ``(n, u, T) = (1, 0, 1)``, with ``m = 1``::

    rho_t = -u.grad(rho) - (1 + rho) div u
    u_t   = mu lap(u)/(1+rho) + (mu+lam) grad div u/(1+rho) - u.grad(u) - grad(theta)
            - (theta+1)/(rho+1) grad(rho)
            + hbar^2/12 lap grad(rho)/(1+rho)
            - hbar^2/3 div(grad sqrt(1+rho) (x) grad sqrt(1+rho))/(1+rho)
    theta_t = 2 kappa lap(theta)/(3(1+rho)) - u.grad(theta) - 2/3 (theta+1) div u
            + hbar^2/(36(1+rho)) div((1+rho) lap u)
            + 2/(3(1+rho)) {mu/2 |grad u + grad u^T|^2 + lam (div u)^2}

Rational coefficients are evaluated pointwise; every derivative is spectral.
Setting ``hbar = 0`` gives the classical Navier-Stokes-Fourier system.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spectral as sp
from .errors import NonFinite
from .fields import Grid, PhysParams, State, check_vacuum


@dataclass(frozen=True)
class Rhs:
    d_rho: np.ndarray
    d_u: np.ndarray
    d_theta: np.ndarray

    def is_finite(self) -> bool:
        return bool(
            np.isfinite(self.d_rho).all() and np.isfinite(self.d_u).all() and np.isfinite(self.d_theta).all()
        )

    def max_abs(self) -> float:
        return float(max(np.abs(self.d_rho).max(), np.abs(self.d_u).max(), np.abs(self.d_theta).max()))


@dataclass(frozen=True)
class Moments:
    Pi: np.ndarray
    P: np.ndarray
    W: np.ndarray
    q: np.ndarray


def advection(u: np.ndarray, f: np.ndarray, grid: Grid) -> np.ndarray:
    """``u . grad f`` for scalar f, or ``(u . grad) f_i`` componentwise for vector f."""
    ws = sp.workspace(grid)
    fh = ws.fft(f)
    out = 0.0
    for j in range(grid.dim):
        out = out + u[j] * ws.ifft(ws.d_hat(fh, j))
    return out


def stress_tensor(u: np.ndarray, grid: Grid, mu: float, lam: float) -> np.ndarray:
    """Newtonian stress ``mu (grad u + grad u^T) + lam (div u) I``."""
    G = sp.vector_gradient(u, grid)
    S = mu * (G + G.swapaxes(0, 1))
    divu = np.trace(G)
    for i in range(grid.dim):
        S[i, i] += lam * divu
    return S


def bohm_force(rho: np.ndarray, hbar: float, grid: Grid) -> np.ndarray:
    """Quantum force in the momentum equation, in the non-conservative two-term form."""
    n = check_vacuum(rho)
    if hbar == 0:
        return np.zeros((grid.dim,) + grid.shape)
    ws = sp.workspace(grid)
    dispersive = sp.laplacian_grad(rho, grid)
    a = sp.grad(np.sqrt(n), grid)
    # div(a (x) a)_i = sum_j d_j (a_i a_j)
    ah = ws.fft(a[:, None] * a[None, :])
    tensor_div = ws.ifft(sum(ws.d_hat(ah[:, j], j) for j in range(grid.dim)))
    return hbar**2 / 12.0 * dispersive / n - hbar**2 / 3.0 * tensor_div / n


def bohm_force_conservative(rho: np.ndarray, hbar: float, grid: Grid) -> np.ndarray:
    """``hbar^2 / (12 n) div(n grad^2 log n)``, the log-Hessian form of the same force."""
    n = check_vacuum(rho)
    H = sp.hessian(np.log(n), grid)
    ws = sp.workspace(grid)
    Th = ws.fft(n * H)
    div = ws.ifft(sum(ws.d_hat(Th[:, j], j) for j in range(grid.dim)))
    return hbar**2 / 12.0 * div / n


def quantum_heat_term(rho: np.ndarray, u: np.ndarray, hbar: float, grid: Grid) -> np.ndarray:
    n = check_vacuum(rho)
    if hbar == 0:
        return np.zeros(grid.shape)
    return hbar**2 / 36.0 * sp.divergence(n * sp.laplacian(u, grid), grid) / n


def viscous_heating(rho: np.ndarray, u: np.ndarray, grid: Grid, mu: float, lam: float) -> np.ndarray:
    n = check_vacuum(rho)
    G = sp.vector_gradient(u, grid)
    D = G + G.swapaxes(0, 1)
    divu = np.trace(G)
    quad = 0.5 * mu * np.sum(D * D, axis=(0, 1)) + lam * divu**2
    return 2.0 / (3.0 * n) * quad


def _assemble(state: State, params: PhysParams, quantum: bool, dealias: bool) -> Rhs:
    g = state.grid
    ws = sp.workspace(g)
    rho, u, theta = state.rho, state.u, state.theta
    n = check_vacuum(rho)
    inv_n = 1.0 / n

    rh, uh, th = ws.fft(rho), ws.fft(u), ws.fft(theta)
    grad_rho = ws.ifft(ws.grad_hat(rh))
    grad_theta = ws.ifft(ws.grad_hat(th))
    divu_h = ws.div_hat(uh)
    divu = ws.ifft(divu_h)
    G = ws.ifft(np.stack([ws.grad_hat(uh[i]) for i in range(g.dim)]))  # G[i, j] = d_j u_i
    lap_u = ws.ifft(-ws.ksq * uh)
    graddiv_u = ws.ifft(ws.grad_hat(divu_h))
    lap_theta = ws.ifft(-ws.ksq * th)

    u_grad_rho = np.einsum("j...,j...->...", u, grad_rho)
    u_grad_theta = np.einsum("j...,j...->...", u, grad_theta)
    u_grad_u = np.einsum("j...,ij...->i...", u, G)

    d_rho = -u_grad_rho - n * divu

    d_u = (
        params.mu * lap_u * inv_n
        + (params.mu + params.lam) * graddiv_u * inv_n
        - u_grad_u
        - grad_theta
        - (theta + 1.0) * inv_n * grad_rho
    )

    D = G + G.swapaxes(0, 1)
    heating = 2.0 / 3.0 * inv_n * (0.5 * params.mu * np.sum(D * D, axis=(0, 1)) + params.lam * divu**2)
    d_theta = (
        2.0 * params.kappa / 3.0 * lap_theta * inv_n
        - u_grad_theta
        - 2.0 / 3.0 * (theta + 1.0) * divu
        + heating
    )

    if quantum:
        d_u = d_u + bohm_force(rho, params.hbar, g)
        d_theta = d_theta + quantum_heat_term(rho, u, params.hbar, g)

    if dealias:
        d_rho = ws.ifft(ws.mask * ws.fft(d_rho))
        d_u = ws.ifft(ws.mask * ws.fft(d_u))
        d_theta = ws.ifft(ws.mask * ws.fft(d_theta))

    out = Rhs(d_rho, d_u, d_theta)
    if not out.is_finite():
        raise NonFinite(f"non-finite right-hand side at t = {state.time:g}")
    return out


def rhs_quantum(state: State, params: PhysParams, dealias: bool = True) -> Rhs:
    return _assemble(state, params, quantum=True, dealias=dealias)


def rhs_classical(state: State, params: PhysParams, dealias: bool = True) -> Rhs:
    return _assemble(state, params, quantum=False, dealias=dealias)


def rhs_for(params: PhysParams):
    """The RHS function a run with these parameters integrates."""
    return rhs_classical if params.hbar == 0 else rhs_quantum


def moment_fields(state: State, params: PhysParams) -> Moments:
    """Momentum density, stress, energy density and heat flux of the conservation form."""
    g = state.grid
    n = check_vacuum(state.rho)
    T = 1.0 + state.theta
    m = params.m
    hb2 = params.hbar**2
    logn = np.log(n)

    Pi = m * n * state.u
    P = hb2 * n / (12.0 * m) * sp.hessian(logn, g)
    for i in range(g.dim):
        P[i, i] -= n * T
    W = 1.5 * n * T + 0.5 * m * n * np.sum(state.u**2, axis=0) - hb2 * n / (24.0 * m) * sp.laplacian(logn, g)
    q = -params.kappa * sp.grad(state.theta, g)
    return Moments(Pi, P, W, q)
