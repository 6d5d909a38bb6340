"""Run configuration and its TOML file format.

Example file::

    schema_version = 1
    dealias = true

    [grid]
    dim = 1
    L = 6.283185307179586
    N = 64

    [phys]
    hbar = 0.05
    mu = 1.0
    lambda = 0.0
    kappa = 1.0

    [init]
    eps = 0.01
    normalize = true
    modes = [
        { field = "rho", k = [1], amp = 1.0, phase = 0.0 },
        { field = "theta", k = [2], amp = 0.5 },
    ]

    [time]
    t_max = 5.0
    cfl_safety = 0.8
    dt_max = 0.05

    [output]
    every = 0.25
    dir = "out"

    [checks]
    regime = true
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError, InvalidParams
from .fields import PhysParams, make_grid
from .initial import InitialSpec, Mode, default_modes, random_modes

SCHEMA_VERSION = 1
MAX_EPS_CHECKED = 0.1


@dataclass(frozen=True)
class SimConfig:
    dim: int = 1
    L: float = 2 * math.pi
    N: int = 64
    phys: PhysParams = field(default_factory=PhysParams)
    init: InitialSpec = field(default_factory=InitialSpec)
    t_max: float = 1.0
    cfl_safety: float = 0.8
    dt_max: float = 0.05
    output_every: float = 0.1
    output_dir: str = "out"
    dealias: bool = True
    regime_checks: bool = True
    seed: int | None = None

    def __post_init__(self):
        make_grid(self.dim, self.L, self.N)
        if not 0 < self.cfl_safety <= 1:
            raise ConfigError("time.cfl_safety must lie in (0, 1]")
        if not self.dt_max > 0:
            raise ConfigError("time.dt_max must be positive")
        if self.t_max < 0:
            raise ConfigError("time.t_max must be nonnegative")
        if not self.output_every > 0:
            raise ConfigError("output.every must be positive")
        if self.regime_checks and self.init.eps > MAX_EPS_CHECKED:
            raise ConfigError(f"init.eps = {self.init.eps} exceeds {MAX_EPS_CHECKED}; disable checks.regime to force it")

    @property
    def grid(self):
        return make_grid(self.dim, self.L, self.N)

    def replace(self, **kw) -> "SimConfig":
        return dataclasses.replace(self, **kw)


_KNOWN = {
    "": {"schema_version", "dealias", "grid", "phys", "init", "time", "output", "checks"},
    "grid": {"dim", "L", "N"},
    "phys": {"hbar", "mu", "lambda", "kappa"},
    "init": {"eps", "modes", "normalize", "rho_mean", "seed", "random_modes"},
    "time": {"t_max", "cfl_safety", "dt_max"},
    "output": {"every", "dir"},
    "checks": {"regime"},
}


def _check_keys(section: str, table: dict) -> None:
    unknown = set(table) - _KNOWN[section]
    if unknown:
        where = f"[{section}]" if section else "top level"
        raise ConfigError(f"unknown key(s) {sorted(unknown)} at {where}")


def config_from_dict(d: dict) -> SimConfig:
    _check_keys("", d)
    version = d.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version}")
    for sec in ("grid", "phys", "init", "time", "output", "checks"):
        if not isinstance(d.get(sec, {}), dict):
            raise ConfigError(f"[{sec}] must be a table")
        _check_keys(sec, d.get(sec, {}))
    g, p, i, t, o, c = (d.get(s, {}) for s in ("grid", "phys", "init", "time", "output", "checks"))
    try:
        phys = PhysParams(
            hbar=float(p.get("hbar", 0.0)),
            mu=float(p.get("mu", 1.0)),
            lam=float(p.get("lambda", 0.0)),
            kappa=float(p.get("kappa", 1.0)),
        )
        dim = int(g.get("dim", 1))
        seed = i.get("seed")
        if "modes" in i:
            modes = [Mode(m["field"], tuple(m["k"]), float(m.get("amp", 1.0)), float(m.get("phase", 0.0))) for m in i["modes"]]
        elif seed is not None:
            modes = random_modes(dim, int(i.get("random_modes", 4)), int(seed))
        else:
            modes = default_modes()
        init = InitialSpec(
            eps=float(i.get("eps", 0.01)),
            modes=tuple(modes),
            normalize=bool(i.get("normalize", True)),
            rho_mean=float(i.get("rho_mean", 0.0)),
        )
        return SimConfig(
            dim=dim,
            L=float(g.get("L", 2 * math.pi)),
            N=int(g.get("N", 64)),
            phys=phys,
            init=init,
            t_max=float(t.get("t_max", 1.0)),
            cfl_safety=float(t.get("cfl_safety", 0.8)),
            dt_max=float(t.get("dt_max", 0.05)),
            output_every=float(o.get("every", 0.1)),
            output_dir=str(o.get("dir", "out")),
            dealias=bool(d.get("dealias", True)),
            regime_checks=bool(c.get("regime", True)),
            seed=None if seed is None else int(seed),
        )
    except InvalidParams:
        raise
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed config: {exc}") from exc


def load_config(path) -> SimConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return config_from_dict(data)


def config_to_dict(cfg: SimConfig) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "dealias": cfg.dealias,
        "grid": {"dim": cfg.dim, "L": cfg.L, "N": cfg.N},
        "phys": {"hbar": cfg.phys.hbar, "mu": cfg.phys.mu, "lambda": cfg.phys.lam, "kappa": cfg.phys.kappa},
        "init": {
            "eps": cfg.init.eps,
            "normalize": cfg.init.normalize,
            "rho_mean": cfg.init.rho_mean,
            "modes": [dict(field=m.field, k=list(m.k), amp=m.amp, phase=m.phase) for m in cfg.init.modes],
        },
        "time": {"t_max": cfg.t_max, "cfl_safety": cfg.cfl_safety, "dt_max": cfg.dt_max},
        "output": {"every": cfg.output_every, "dir": cfg.output_dir},
        "checks": {"regime": cfg.regime_checks},
    }
