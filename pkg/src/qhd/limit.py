"""Semiclassical-limit study: an hbar family against the classical run.

Every member starts from the same initial data and advances on the same
fixed time grid, so differences between members come from the O(hbar^2)
terms alone. Rates are fitted on log(error) against log(hbar).
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import SimConfig
from .diagnostics import derivative_energies
from .errors import AllBelowNoiseFloor, InsufficientPoints, MisalignedTrajectories, QHDError
from .fields import State
from .initial import initial_state
from .integrate import StepControl, Trajectory, integrate, snapshot_times, stable_dt

log = logging.getLogger(__name__)

NOISE_FACTOR = 10.0


def max_workers(requested: int | None = None) -> int:
    n = requested or os.cpu_count() or 1
    cap = os.environ.get("QHD_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return max(1, n)


@dataclass
class Family:
    runs: dict  # hbar -> Trajectory
    dt: float
    initial: State

    @property
    def baseline(self) -> Trajectory:
        return self.runs[0.0]

    @property
    def hbars(self) -> list[float]:
        return sorted(h for h in self.runs if h > 0)


def _run_member(args):
    state, params, t_out, dt, dealias = args
    return integrate(state, params, t_out, dt_fixed=dt, dealias=dealias, regime_checks=False)


def family_dt(state: State, config: SimConfig, hbar_list) -> float:
    """Smallest stable step over the family, capped by ``dt_max``."""
    dts = [stable_dt(state, config.phys.with_hbar(h), config.cfl_safety) for h in hbar_list]
    return float(min(min(dts), config.dt_max))


def run_family(
    config: SimConfig,
    hbar_list,
    *,
    workers: int | None = None,
    dt: float | None = None,
    initial: State | None = None,
) -> Family:
    """Integrate the same initial data for every hbar (0 is always included)."""
    hbars = sorted({float(h) for h in hbar_list} | {0.0})
    if any(h < 0 for h in hbars):
        raise ValueError("hbar values must be nonnegative")
    state = initial if initial is not None else initial_state(config.grid, config.init, 0.0)
    if dt is None:
        dt = family_dt(state, config, hbars)
    t_out = snapshot_times(config.t_max, config.output_every)
    jobs = [(state, config.phys.with_hbar(h), t_out, dt, config.dealias) for h in hbars]
    nw = min(max_workers(workers), len(jobs))
    if nw > 1:
        with ProcessPoolExecutor(max_workers=nw) as pool:
            trajs = list(pool.map(_run_member, jobs))
    else:
        trajs = [_run_member(j) for j in jobs]
    runs = dict(zip(hbars, trajs))
    if not runs[0.0].ok:
        raise QHDError(f"classical baseline aborted: {runs[0.0].status} ({runs[0.0].message})")
    for h, tr in runs.items():
        if not tr.ok:
            log.warning("family member hbar=%g ended with %s", h, tr.status)
    return Family(runs, dt, state)


def hk_diff(a: State, b: State, k: int) -> float:
    """``||(rho_a - rho_b, u_a - u_b, theta_a - theta_b)||_{H^k}``."""
    g = a.grid
    total = 0.0
    for f in (a.rho - b.rho, a.u - b.u, a.theta - b.theta):
        total += derivative_energies(f, g, k).sum()
    return float(np.sqrt(total))


@dataclass
class DiffNorms:
    times: np.ndarray
    h1: np.ndarray
    h2: np.ndarray

    @property
    def sup_h1(self) -> float:
        return float(self.h1.max())

    @property
    def sup_h2(self) -> float:
        return float(self.h2.max())


def diff_norms(traj_h: Trajectory, traj_0: Trajectory) -> DiffNorms:
    sa = getattr(traj_h, "states", traj_h)
    sb = getattr(traj_0, "states", traj_0)
    if len(sa) != len(sb):
        raise MisalignedTrajectories(f"{len(sa)} vs {len(sb)} snapshots")
    if sa and sa[0].grid != sb[0].grid:
        raise MisalignedTrajectories("trajectories live on different grids")
    ta = np.array([s.time for s in sa])
    tb = np.array([s.time for s in sb])
    if not np.allclose(ta, tb, rtol=0, atol=1e-12 * max(1.0, float(np.abs(ta).max(initial=0)))):
        raise MisalignedTrajectories("snapshot times differ")
    h1 = np.array([hk_diff(a, b, 1) for a, b in zip(sa, sb)])
    h2 = np.array([hk_diff(a, b, 2) for a, b in zip(sa, sb)])
    return DiffNorms(ta, h1, h2)


@dataclass
class PowerFit:
    slope: float
    intercept: float
    residual: float
    used: np.ndarray

    def predict(self, hbar):
        return np.exp(self.intercept) * np.asarray(hbar, dtype=float) ** self.slope


def fit_power_law(hbar, errors, noise_floor: float = 0.0, min_points: int = 4) -> PowerFit:
    """Least-squares fit of ``log e = slope log hbar + intercept``.

    Points with ``e <= NOISE_FACTOR * noise_floor`` are left out.
    """
    hbar = np.asarray(hbar, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if hbar.shape != errors.shape:
        raise ValueError("hbar and errors must have the same length")
    ok = (hbar > 0) & (errors > 0)
    if ok.sum() < min_points:
        raise InsufficientPoints(f"need {min_points} positive (hbar, error) pairs, got {int(ok.sum())}")
    used = ok & (errors > NOISE_FACTOR * noise_floor)
    if not used.any():
        raise AllBelowNoiseFloor(f"every error is within {NOISE_FACTOR}x the noise floor {noise_floor:.3g}")
    if used.sum() < min_points:
        raise InsufficientPoints(f"only {int(used.sum())} errors above the noise floor")
    x, y = np.log(hbar[used]), np.log(errors[used])
    (slope, intercept), res, *_ = np.polyfit(x, y, 1, full=True)
    residual = float(np.sqrt(res[0] / used.sum())) if res.size else 0.0
    return PowerFit(float(slope), float(intercept), residual, used)


@dataclass
class RateFit:
    hbar_values: np.ndarray
    errors_h1: np.ndarray
    errors_h2: np.ndarray
    h1: PowerFit
    h2: PowerFit
    noise_floor_h1: float = 0.0
    noise_floor_h2: float = 0.0

    @property
    def slope_h1(self) -> float:
        return self.h1.slope

    @property
    def slope_h2(self) -> float:
        return self.h2.slope

    def summary(self) -> str:
        lines = [
            f"hbar_values = {list(map(float, self.hbar_values))}",
            f"noise_floor_h1 = {self.noise_floor_h1:.6e}",
            f"noise_floor_h2 = {self.noise_floor_h2:.6e}",
            f"slope_h1 = {self.h1.slope:.6f}",
            f"intercept_h1 = {self.h1.intercept:.6f}",
            f"residual_h1 = {self.h1.residual:.6e}",
            f"slope_h2 = {self.h2.slope:.6f}",
            f"intercept_h2 = {self.h2.intercept:.6f}",
            f"residual_h2 = {self.h2.residual:.6e}",
        ]
        return "\n".join(lines) + "\n"


def fit_rate(hbar, errors_h1, errors_h2, noise_floor_h1: float = 0.0, noise_floor_h2: float = 0.0) -> RateFit:
    return RateFit(
        np.asarray(hbar, dtype=float),
        np.asarray(errors_h1, dtype=float),
        np.asarray(errors_h2, dtype=float),
        fit_power_law(hbar, errors_h1, noise_floor_h1),
        fit_power_law(hbar, errors_h2, noise_floor_h2),
        noise_floor_h1,
        noise_floor_h2,
    )


def noise_floor(config: SimConfig, initial: State, dt: float) -> tuple[float, float]:
    """sup-in-time H1/H2 gaps between classical runs at dt and dt/2."""
    t_out = snapshot_times(config.t_max, config.output_every)
    params = config.phys.with_hbar(0.0)
    a = integrate(initial, params, t_out, dt_fixed=dt, dealias=config.dealias, regime_checks=False)
    b = integrate(initial, params, t_out, dt_fixed=dt / 2, dealias=config.dealias, regime_checks=False)
    d = diff_norms(a, b)
    return d.sup_h1, d.sup_h2


@dataclass
class LimitStudy:
    family: Family
    diffs: dict = field(default_factory=dict)  # hbar -> DiffNorms
    floor: tuple = (0.0, 0.0)
    fit: RateFit | None = None

    def rows(self):
        for h in self.family.hbars:
            d = self.diffs.get(h)
            e1, e2 = (d.sup_h1, d.sup_h2) if d is not None else (float("nan"), float("nan"))
            yield h, e1, e2, self.family.runs[h].status


def limit_study(config: SimConfig, hbar_list, *, workers: int | None = None) -> LimitStudy:
    fam = run_family(config, hbar_list, workers=workers)
    study = LimitStudy(fam)
    for h in fam.hbars:
        if fam.runs[h].ok:
            study.diffs[h] = diff_norms(fam.runs[h], fam.baseline)
    study.floor = noise_floor(config, fam.initial, fam.dt)
    hs = [h for h in fam.hbars if h in study.diffs]
    if len(hs) >= 4:
        study.fit = fit_rate(
            hs,
            [study.diffs[h].sup_h1 for h in hs],
            [study.diffs[h].sup_h2 for h in hs],
            *study.floor,
        )
    return study
