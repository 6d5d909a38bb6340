"""Command-line entry point: ``qhd {simulate,limit-study,verify-ops,mms,report}``.

Exit codes: 0 success, 2 usage, 3 config, 4 numerical abort, 5 check failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .config import SimConfig, load_config
from .errors import ConfigError, InvalidParams, QHDError
from .fields import make_grid

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_ABORT, EXIT_CHECKS = 0, 2, 3, 4, 5
COMMANDS = ("simulate", "limit-study", "verify-ops", "mms", "report")
DEFAULT_HBAR_LIST = (0.0, 0.02, 0.04, 0.08, 0.16)

log = logging.getLogger("qhd")


@dataclass
class Command:
    name: str
    config: str | None = None
    out: str | None = None
    overrides: dict = field(default_factory=dict)
    hbar_list: tuple | None = None
    seed: int | None = None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


class UsageError(Exception):
    pass


def _even_grid(text: str) -> int:
    try:
        N = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid grid size {text!r}")
    try:
        make_grid(1, 1.0, N)
    except QHDError as exc:
        raise argparse.ArgumentTypeError(f"{type(exc).__name__}: {exc}")
    return N


def _float_list(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid comma-separated list {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML run configuration")
    common.add_argument("--out", help="output directory (overrides output.dir)")
    common.add_argument("--hbar", type=float)
    common.add_argument("--grid", type=_even_grid, help="points per axis N")
    common.add_argument("--dim", type=int, choices=(1, 2, 3))
    common.add_argument("--tmax", type=float)
    common.add_argument("--eps", type=float)
    common.add_argument("--hbar-list", type=_float_list, help="comma-separated hbar values")
    common.add_argument("--seed", type=int)
    p = _Parser(prog="qhd", description="Quantum hydrodynamics pseudo-spectral solver")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("simulate", parents=[common], help="run one simulation")
    sub.add_parser("limit-study", parents=[common], help="hbar family vs classical baseline")
    sub.add_parser("verify-ops", parents=[common], help="operator/identity property suite")
    sub.add_parser("mms", parents=[common], help="manufactured-solution spatial accuracy table")
    sub.add_parser("report", parents=[common], help="plot-ready CSV from snapshot files")
    return p


def parse_cli(argv) -> Command:
    ns = build_parser().parse_args(list(argv))
    overrides = {
        k: v
        for k, v in dict(hbar=ns.hbar, N=ns.grid, dim=ns.dim, t_max=ns.tmax, eps=ns.eps).items()
        if v is not None
    }
    return Command(ns.command, ns.config, ns.out, overrides, ns.hbar_list, ns.seed)


def resolve_config(cmd: Command) -> SimConfig:
    cfg = load_config(cmd.config) if cmd.config else SimConfig()
    ov = dict(cmd.overrides)
    kw = {}
    for key in ("N", "dim", "t_max"):
        if key in ov:
            kw[key] = ov[key]
    if "hbar" in ov:
        kw["phys"] = cfg.phys.with_hbar(ov["hbar"])
    if "eps" in ov:
        kw["init"] = dataclasses.replace(cfg.init, eps=ov["eps"])
    if cmd.seed is not None:
        from .initial import random_modes

        init = kw.get("init", cfg.init)
        kw["init"] = dataclasses.replace(init, modes=tuple(random_modes(kw.get("dim", cfg.dim), 4, cmd.seed)))
        kw["seed"] = cmd.seed
    if cmd.out:
        kw["output_dir"] = cmd.out
    return cfg.replace(**kw) if kw else cfg


def _simulate(cmd: Command) -> int:
    from .integrate import COMPLETED, REGIME_EXIT, simulate
    from .io import write_status, write_trajectory

    cfg = resolve_config(cmd)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    traj, report = simulate(cfg)
    write_trajectory(out, traj)
    if report is not None:
        report.to_csv(out / "energy_report.csv")
    write_status(out / "status.json", traj.status, traj.message, n_steps=traj.n_steps, t_final=traj.final.time)
    print(f"simulate: {traj.status} after {traj.n_steps} steps, t = {traj.final.time:g}")
    return EXIT_OK if traj.status in (COMPLETED, REGIME_EXIT) else EXIT_ABORT


def _limit_study(cmd: Command) -> int:
    from .io import write_family_csv, write_status
    from .limit import limit_study

    cfg = resolve_config(cmd)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    hbars = cmd.hbar_list or DEFAULT_HBAR_LIST
    try:
        study = limit_study(cfg, hbars)
    except QHDError as exc:
        write_status(out / "status.json", "baseline_abort", str(exc))
        print(f"limit-study: {exc}", file=sys.stderr)
        return EXIT_ABORT
    write_family_csv(out / "family.csv", study.rows())
    if study.fit is not None:
        text = study.fit.summary()
    else:
        text = (
            f"noise_floor_h1 = {study.floor[0]:.6e}\nnoise_floor_h2 = {study.floor[1]:.6e}\n"
            "fit = skipped (fewer than 4 positive hbar values)\n"
        )
    (out / "fit_report.txt").write_text(text)
    write_status(out / "status.json", "completed", dt=study.family.dt)
    print(text, end="")
    return EXIT_OK


def _verify_ops(cmd: Command) -> int:
    from .verify import format_table, run_checks

    cfg = resolve_config(cmd)
    checks = run_checks(make_grid(cfg.dim, cfg.L, cfg.N), seed=cmd.seed or 0)
    print(format_table(checks))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_CHECKS


def _mms(cmd: Command) -> int:
    from .mms import mms_table

    rows = mms_table()
    if cmd.out:
        Path(cmd.out).mkdir(parents=True, exist_ok=True)
        with open(Path(cmd.out) / "mms.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["term", "err_n16", "err_n32", "ratio"])
            for r in rows:
                w.writerow([r.term, repr(r.errors[0]), repr(r.errors[1]), repr(r.ratio)])
    print(f"{'term':24s}  {'N=16':>10}  {'N=32':>10}  {'ratio':>9}  result")
    for r in rows:
        print(f"{r.term:24s}  {r.errors[0]:10.3e}  {r.errors[1]:10.3e}  {r.ratio:9.2e}  {'PASS' if r.passed else 'FAIL'}")
    return EXIT_OK if all(r.passed for r in rows) else EXIT_CHECKS


def _report(cmd: Command) -> int:
    from .diagnostics import energy_budget
    from .io import read_trajectory, write_profiles_csv

    cfg = resolve_config(cmd)
    out = Path(cfg.output_dir)
    states = read_trajectory(out)
    if len(states) < 2:
        print(f"report: need at least two snapshots in {out}", file=sys.stderr)
        return EXIT_CONFIG
    energy_budget(states, cfg.phys).to_csv(out / "energy_report.csv")
    write_profiles_csv(out / "profiles.csv", states)
    print(f"report: wrote {out / 'energy_report.csv'} and {out / 'profiles.csv'}")
    return EXIT_OK


_HANDLERS = {
    "simulate": _simulate,
    "limit-study": _limit_study,
    "verify-ops": _verify_ops,
    "mms": _mms,
    "report": _report,
}


def run_command(cmd: Command) -> int:
    try:
        return _HANDLERS[cmd.name](cmd)
    except (ConfigError, InvalidParams) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QHDError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ABORT


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cmd = parse_cli(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"qhd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run_command(cmd)


if __name__ == "__main__":
    sys.exit(main())
