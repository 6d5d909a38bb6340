"""Manufactured-solution check of the spatial discretisation.

Analytic (not band-limited) periodic fields are pushed through every term
group of the right-hand side; the spectral result is compared with sympy's
exact derivatives. For entire data the error must collapse spectrally as N
grows.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy as smp

from . import spectral as sp
from .dynamics import advection, bohm_force, quantum_heat_term, rhs_quantum, viscous_heating
from .fields import PhysParams, State, make_grid

X, Y = smp.symbols("x y", real=True)


def manufactured_fields():
    rho = smp.Rational(1, 5) * smp.sin(X + smp.cos(Y) / 2)
    u0 = smp.Rational(1, 10) * smp.exp(smp.cos(X)) * smp.sin(Y)
    u1 = smp.Rational(1, 10) * smp.cos(X - smp.sin(Y))
    theta = smp.Rational(1, 10) * smp.exp(smp.sin(X + Y)) - smp.Rational(1, 10)
    return rho, (u0, u1), theta


def _grad(f):
    return [smp.diff(f, X), smp.diff(f, Y)]


def _div(v):
    return smp.diff(v[0], X) + smp.diff(v[1], Y)


def _lap(f):
    return smp.diff(f, X, 2) + smp.diff(f, Y, 2)


def symbolic_terms(params: PhysParams) -> dict:
    """Exact value of every term group for the manufactured fields."""
    mu, lam, kappa = (smp.nsimplify(v) for v in (params.mu, params.lam, params.kappa))
    hb2 = smp.nsimplify(params.hbar) ** 2
    rho, u, theta = manufactured_fields()
    n = 1 + rho
    gr, gt = _grad(rho), _grad(theta)
    divu = _div(u)
    G = [[smp.diff(u[i], c) for c in (X, Y)] for i in range(2)]  # G[i][j] = d_j u_i
    sq = smp.sqrt(n)
    a = _grad(sq)
    terms = {
        "continuity": [-(u[0] * gr[0] + u[1] * gr[1]) - n * divu],
        "viscosity": [mu * _lap(u[i]) / n + (mu + lam) * smp.diff(divu, c) / n for i, c in enumerate((X, Y))],
        "advection_u": [-(u[0] * G[i][0] + u[1] * G[i][1]) for i in range(2)],
        "pressure": [-gt[i] - (theta + 1) / n * gr[i] for i in range(2)],
        "bohm": [
            hb2 / 12 * smp.diff(_lap(rho), c) / n
            - hb2 / 3 * (smp.diff(a[i] * a[0], X) + smp.diff(a[i] * a[1], Y)) / n
            for i, c in enumerate((X, Y))
        ],
        "heat_diffusion": [2 * kappa / (3 * n) * _lap(theta)],
        "advection_compression": [-(u[0] * gt[0] + u[1] * gt[1]) - smp.Rational(2, 3) * (theta + 1) * divu],
        "quantum_heat": [hb2 / (36 * n) * _div([n * _lap(u[0]), n * _lap(u[1])])],
        "viscous_heating": [
            2 / (3 * n)
            * (mu / 2 * sum((G[i][j] + G[j][i]) ** 2 for i in range(2) for j in range(2)) + lam * divu**2)
        ],
    }
    return terms


@lru_cache(maxsize=8)
def _lambdified(params: PhysParams):
    out = {name: [smp.lambdify((X, Y), e, "numpy") for e in exprs] for name, exprs in symbolic_terms(params).items()}
    fields = manufactured_fields()
    flat = [fields[0], *fields[1], fields[2]]
    out["_fields"] = [smp.lambdify((X, Y), e, "numpy") for e in flat]
    return out


def manufactured_state(N: int, params: PhysParams) -> State:
    grid = make_grid(2, 2 * np.pi, N)
    x, y = grid.coords()
    f = [np.broadcast_to(fn(x, y), grid.shape).astype(float) for fn in _lambdified(params)["_fields"]]
    return State(grid, f[0], np.stack(f[1:3]), f[3])


def numeric_terms(state: State, params: PhysParams) -> dict:
    g = state.grid
    rho, u, theta = state.rho, state.u, state.theta
    n = 1.0 + rho
    divu = sp.divergence(u, g)
    return {
        "continuity": -advection(u, rho, g) - n * divu,
        "viscosity": params.mu * sp.laplacian(u, g) / n + (params.mu + params.lam) * sp.grad_div(u, g) / n,
        "advection_u": -advection(u, u, g),
        "pressure": -sp.grad(theta, g) - (theta + 1.0) / n * sp.grad(rho, g),
        "bohm": bohm_force(rho, params.hbar, g),
        "heat_diffusion": 2 * params.kappa / (3 * n) * sp.laplacian(theta, g),
        "advection_compression": -advection(u, theta, g) - 2.0 / 3.0 * (theta + 1.0) * divu,
        "quantum_heat": quantum_heat_term(rho, u, params.hbar, g),
        "viscous_heating": viscous_heating(rho, u, g, params.mu, params.lam),
    }


def exact_terms(state: State, params: PhysParams) -> dict:
    x, y = state.grid.coords()
    out = {}
    for name, fns in _lambdified(params).items():
        if name.startswith("_"):
            continue
        vals = [np.broadcast_to(fn(x, y), state.grid.shape).astype(float) for fn in fns]
        out[name] = vals[0] if len(vals) == 1 else np.stack(vals)
    return out


def _rhs_groups(terms: dict) -> dict:
    """Collect term groups into the three equations."""
    return {
        "rhs_rho": terms["continuity"],
        "rhs_u": terms["viscosity"] + terms["advection_u"] + terms["pressure"] + terms["bohm"],
        "rhs_theta": terms["heat_diffusion"] + terms["advection_compression"] + terms["quantum_heat"] + terms["viscous_heating"],
    }


def term_errors(N: int, params: PhysParams) -> dict:
    """Max-norm error of every term group, plus the assembled RHS, at resolution N."""
    state = manufactured_state(N, params)
    num = numeric_terms(state, params)
    ex = exact_terms(state, params)
    err = {k: float(np.abs(num[k] - ex[k]).max()) for k in num}
    rhs = rhs_quantum(state, params, dealias=False)
    exr = _rhs_groups(ex)
    err["rhs_rho"] = float(np.abs(rhs.d_rho - exr["rhs_rho"]).max())
    err["rhs_u"] = float(np.abs(rhs.d_u - exr["rhs_u"]).max())
    err["rhs_theta"] = float(np.abs(rhs.d_theta - exr["rhs_theta"]).max())
    return err


@dataclass
class MMSRow:
    term: str
    errors: tuple
    ratio: float

    @property
    def passed(self) -> bool:
        return self.ratio > 1e3


DEFAULT_MMS_PARAMS = PhysParams(hbar=1.0, mu=1.0, lam=0.3, kappa=0.7)


def mms_table(resolutions=(16, 32), params: PhysParams = DEFAULT_MMS_PARAMS) -> list[MMSRow]:
    errs = [term_errors(N, params) for N in resolutions]
    rows = []
    for name in errs[0]:
        e = tuple(d[name] for d in errs)
        ratio = e[0] / e[-1] if e[-1] > 0 else float("inf")
        rows.append(MMSRow(name, e, ratio))
    return rows
