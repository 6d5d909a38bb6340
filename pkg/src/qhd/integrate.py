"""Explicit RK4 time stepping, the step-size rule and the simulation driver."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .config import SimConfig
from .diagnostics import EnergyReport, energy_budget
from .dynamics import Rhs, rhs_for
from .errors import NonFinite, VacuumApproach
from .fields import Grid, PhysParams, State, check_vacuum
from .initial import initial_state

log = logging.getLogger(__name__)

# Stability constants of stable_dt. C_VISC and C_DISP include the factor-of-two
# margin for the 1D longitudinal viscosity 2*mu + lambda against nu_eff.
C_ADV = 0.8
C_VISC = 0.1
C_DISP = 0.5
SOUND_SPEED = math.sqrt(PhysParams.gamma * PhysParams.R)

COMPLETED = "completed"
VACUUM_ABORT = "vacuum_abort"
NONFINITE_ABORT = "nonfinite_abort"
REGIME_EXIT = "regime_exit"


@dataclass
class StepControl:
    safety: float = 0.8
    dt_max: float = 0.05
    dt_current: float = 0.0

    def __post_init__(self):
        if not 0 < self.safety <= 1:
            raise ValueError("safety must lie in (0, 1]")
        if not self.dt_max > 0:
            raise ValueError("dt_max must be positive")


@dataclass
class Trajectory:
    states: list = field(default_factory=list)
    status: str = COMPLETED
    message: str = ""
    n_steps: int = 0
    regime_exited: bool = False
    step_time: list = field(default_factory=list)
    step_mass: list = field(default_factory=list)
    step_l2: list = field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.states])

    @property
    def grid(self) -> Grid:
        return self.states[0].grid

    @property
    def final(self) -> State:
        return self.states[-1]

    @property
    def ok(self) -> bool:
        return self.status in (COMPLETED, REGIME_EXIT)


def stable_dt(state: State, params: PhysParams, safety: float = 1.0) -> float:
    """Largest step allowed by advection, diffusion and (when hbar > 0) dispersion.

    ``dt = safety * min(C_ADV h/(max|u| + c_s), C_VISC h^2/nu_eff, C_DISP h^3/hbar)``
    with ``nu_eff = max(mu, mu + lambda, 2 kappa/3) / min(1 + rho)``.
    """
    h = state.grid.h
    umax = float(np.sqrt(np.sum(state.u**2, axis=0)).max()) if state.u.size else 0.0
    nmin = max(state.min_density(), 1e-300)
    nu_eff = max(params.mu, params.mu + params.lam, 2 * params.kappa / 3) / nmin
    dt = min(C_ADV * h / (umax + SOUND_SPEED), C_VISC * h**2 / nu_eff)
    if params.hbar > 0:
        dt = min(dt, C_DISP * h**3 / params.hbar)
    return safety * dt


def _combine(state: State, dt: float, k: Rhs) -> State:
    return State(
        state.grid,
        state.rho + dt * k.d_rho,
        state.u + dt * k.d_u,
        state.theta + dt * k.d_theta,
        state.time + dt,
    )


def rk4_step(state: State, dt: float, params: PhysParams, rhs_fn=None, dealias: bool = True) -> State:
    """One classical fourth-order Runge-Kutta step."""
    rhs_fn = rhs_fn or rhs_for(params)
    k1 = rhs_fn(state, params, dealias=dealias)
    k2 = rhs_fn(_combine(state, 0.5 * dt, k1), params, dealias=dealias)
    k3 = rhs_fn(_combine(state, 0.5 * dt, k2), params, dealias=dealias)
    k4 = rhs_fn(_combine(state, dt, k3), params, dealias=dealias)
    w = dt / 6.0
    new = State(
        state.grid,
        state.rho + w * (k1.d_rho + 2 * k2.d_rho + 2 * k3.d_rho + k4.d_rho),
        state.u + w * (k1.d_u + 2 * k2.d_u + 2 * k3.d_u + k4.d_u),
        state.theta + w * (k1.d_theta + 2 * k2.d_theta + 2 * k3.d_theta + k4.d_theta),
        state.time + dt,
    )
    if not new.is_finite():
        raise NonFinite(f"non-finite state after step to t = {new.time:g}")
    check_vacuum(new.rho)
    return new


def snapshot_times(t_max: float, every: float) -> np.ndarray:
    n = int(math.floor(t_max / every + 1e-9))
    t = every * np.arange(n + 1)
    if t_max - t[-1] > 1e-9 * max(1.0, t_max):
        t = np.append(t, t_max)
    return t


def integrate(
    state: State,
    params: PhysParams,
    t_out: np.ndarray,
    *,
    control: StepControl | None = None,
    dt_fixed: float | None = None,
    dealias: bool = True,
    regime_checks: bool = True,
) -> Trajectory:
    """Advance ``state`` through the snapshot times ``t_out`` (first entry = start time).

    With ``dt_fixed`` every snapshot interval is split into equal steps no longer
    than ``dt_fixed``; otherwise dt follows :func:`stable_dt` at every step.
    """
    control = control or StepControl()
    rhs_fn = rhs_for(params)
    traj = Trajectory(states=[state])
    traj.regime_exited = not state.in_regime()
    cur = state

    def log_step(s: State):
        traj.step_time.append(s.time)
        traj.step_mass.append(s.mass())
        traj.step_l2.append(float(np.sqrt(s.grid.integrate(s.rho**2 + np.sum(s.u**2, axis=0) + s.theta**2))))

    log_step(cur)
    try:
        check_vacuum(cur.rho)
        for t_next in t_out[1:]:
            if dt_fixed is not None:
                nsub = max(1, int(math.ceil((t_next - cur.time) / dt_fixed - 1e-9)))
                dt = (t_next - cur.time) / nsub
                for i in range(nsub):
                    cur = rk4_step(cur, dt, params, rhs_fn, dealias)
                    traj.n_steps += 1
                    log_step(cur)
                    traj.regime_exited |= not cur.in_regime()
                cur = cur.replace(time=float(t_next))
            else:
                while cur.time < t_next:
                    dt = min(stable_dt(cur, params, control.safety), control.dt_max)
                    remaining = t_next - cur.time
                    if dt >= remaining * (1 - 1e-10):
                        dt = remaining
                    elif dt > 0.5 * remaining:
                        dt = 0.5 * remaining
                    control.dt_current = dt
                    cur = rk4_step(cur, dt, params, rhs_fn, dealias)
                    if abs(cur.time - t_next) < 1e-12 * max(1.0, abs(t_next)):
                        cur = cur.replace(time=float(t_next))
                    traj.n_steps += 1
                    log_step(cur)
                    traj.regime_exited |= not cur.in_regime()
            traj.states.append(cur)
    except VacuumApproach as exc:
        traj.status, traj.message = VACUUM_ABORT, str(exc)
        log.warning("vacuum abort: %s", exc)
        return traj
    except NonFinite as exc:
        traj.status, traj.message = NONFINITE_ABORT, str(exc)
        log.warning("non-finite abort: %s", exc)
        return traj
    if regime_checks and traj.regime_exited:
        traj.status = REGIME_EXIT
        traj.message = "max|rho| or max|theta| exceeded 1/2"
    return traj


def simulate(
    config: SimConfig,
    *,
    initial: State | None = None,
    dt_fixed: float | None = None,
) -> tuple[Trajectory, EnergyReport | None]:
    """Integrate the configured run to ``t_max`` and build its energy report."""
    grid = config.grid
    state = initial if initial is not None else initial_state(grid, config.init, config.phys.hbar)
    t_out = snapshot_times(config.t_max, config.output_every)
    control = StepControl(config.cfl_safety, config.dt_max)
    traj = integrate(
        state,
        config.phys,
        t_out,
        control=control,
        dt_fixed=dt_fixed,
        dealias=config.dealias,
        regime_checks=config.regime_checks,
    )
    report = energy_budget(traj, config.phys) if len(traj.states) >= 2 else None
    return traj, report
