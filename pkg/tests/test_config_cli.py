import csv
import json
import math

import numpy as np
import pytest

from qhd.cli import EXIT_ABORT, EXIT_CONFIG, EXIT_OK, EXIT_USAGE, main, parse_cli, resolve_config
from qhd.config import SimConfig, config_from_dict, config_to_dict, load_config
from qhd.diagnostics import REPORT_COLUMNS
from qhd.errors import ConfigError, OddResolution
from qhd.io import FAMILY_COLUMNS, read_snapshot, read_trajectory

VACUUM_TOML = """
schema_version = 1
[grid]
dim = 1
N = 64
[phys]
mu = 0.01
kappa = 0.01
[init]
eps = 0.6
normalize = false
modes = [{field = "u0", k = [1], amp = -5.0}]
[time]
t_max = 3.0
[checks]
regime = false
"""


def _write(tmp_path, text, name="run.toml"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestConfig:
    def test_defaults(self):
        cfg = config_from_dict({})
        assert cfg == SimConfig()

    def test_full_round_trip(self):
        cfg = SimConfig(dim=2, N=32, t_max=0.5, seed=None)
        assert config_from_dict(config_to_dict(cfg)) == cfg

    def test_load_toml(self, tmp_path):
        p = _write(tmp_path, '[grid]\ndim = 2\nN = 32\n[phys]\nhbar = 0.1\nlambda = 0.2\n[output]\ndir = "x"\n')
        cfg = load_config(p)
        assert (cfg.dim, cfg.N, cfg.phys.hbar, cfg.phys.lam, cfg.output_dir) == (2, 32, 0.1, 0.2, "x")

    @pytest.mark.parametrize("text", ["bogus = 1\n", "[grid]\nNN = 4\n", "[phys]\nnu = 1\n", "[extra]\n"])
    def test_unknown_keys_rejected(self, tmp_path, text):
        with pytest.raises(ConfigError):
            load_config(_write(tmp_path, text))

    def test_large_eps_rejected_unless_checks_off(self):
        with pytest.raises(ConfigError):
            config_from_dict({"init": {"eps": 0.6}})
        assert config_from_dict({"init": {"eps": 0.6}, "checks": {"regime": False}}).init.eps == 0.6

    def test_missing_and_malformed(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nope.toml")
        with pytest.raises(ConfigError):
            load_config(_write(tmp_path, "[grid\n"))
        with pytest.raises(ConfigError):
            config_from_dict({"schema_version": 2})

    def test_odd_grid_in_config(self):
        with pytest.raises(OddResolution):
            config_from_dict({"grid": {"N": 31}})

    def test_seeded_random_modes(self):
        a = config_from_dict({"init": {"seed": 3}})
        b = config_from_dict({"init": {"seed": 3}})
        assert a.init.modes == b.init.modes and a.init.modes != SimConfig().init.modes


class TestParse:
    def test_flags(self):
        cmd = parse_cli(["simulate", "--hbar", "0.1", "--grid", "128", "--dim", "2", "--tmax", "3", "--eps", "0.05"])
        assert cmd.name == "simulate"
        assert cmd.overrides == dict(hbar=0.1, N=128, dim=2, t_max=3.0, eps=0.05)
        cfg = resolve_config(cmd)
        assert (cfg.N, cfg.dim, cfg.t_max, cfg.phys.hbar, cfg.init.eps) == (128, 2, 3.0, 0.1, 0.05)

    def test_hbar_list(self):
        assert parse_cli(["limit-study", "--hbar-list", "0,0.02,0.04"]).hbar_list == (0.0, 0.02, 0.04)

    def test_odd_grid_usage_error(self, capsys):
        assert main(["simulate", "--grid", "7"]) == EXIT_USAGE
        assert "OddResolution" in capsys.readouterr().err

    @pytest.mark.parametrize("argv", [[], ["frobnicate"], ["simulate", "--bogus"], ["simulate", "--hbar", "x"]])
    def test_usage_errors(self, argv):
        assert main(argv) == EXIT_USAGE

    def test_config_overridden_by_flags(self, tmp_path):
        p = _write(tmp_path, "[grid]\nN = 32\n[phys]\nhbar = 0.3\n")
        cfg = resolve_config(parse_cli(["simulate", "--config", str(p), "--hbar", "0.1", "--out", str(tmp_path / "o")]))
        assert cfg.N == 32 and cfg.phys.hbar == 0.1 and cfg.output_dir == str(tmp_path / "o")

    def test_missing_config_exit(self, tmp_path):
        assert main(["simulate", "--config", str(tmp_path / "absent.toml")]) == EXIT_CONFIG


class TestCommands:
    def test_verify_ops(self, capsys):
        assert main(["verify-ops"]) == EXIT_OK
        assert "FAIL" not in capsys.readouterr().out

    def test_simulate_zero_data(self, tmp_path):
        out = tmp_path / "zero"
        assert main(["simulate", "--eps", "0", "--grid", "16", "--tmax", "0.3", "--out", str(out)]) == EXIT_OK
        states = read_trajectory(out)
        assert len(states) == 4
        assert all(not s.rho.any() and not s.u.any() and not s.theta.any() for s in states)
        assert json.loads((out / "status.json").read_text())["status"] == "completed"
        with open(out / "energy_report.csv") as fh:
            rows = list(csv.reader(fh))
        assert tuple(rows[0]) == REPORT_COLUMNS
        assert all(float(r[1]) == 0.0 for r in rows[1:])

    def test_simulate_vacuum_abort(self, tmp_path):
        out = tmp_path / "vac"
        code = main(["simulate", "--config", str(_write(tmp_path, VACUUM_TOML)), "--out", str(out)])
        assert code == EXIT_ABORT
        status = json.loads((out / "status.json").read_text())
        assert status["status"] == "vacuum_abort" and status["message"]

    def test_outputs_byte_stable(self, tmp_path):
        blobs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert main(["simulate", "--grid", "16", "--tmax", "0.2", "--hbar", "0.1", "--out", str(out)]) == EXIT_OK
            blobs.append([p.read_bytes() for p in sorted(out.iterdir())])
        assert blobs[0] == blobs[1]

    def test_snapshot_header(self, tmp_path):
        out = tmp_path / "s"
        main(["simulate", "--grid", "16", "--dim", "2", "--tmax", "0.1", "--out", str(out)])
        first = (out / "snap_00000.qhd").read_bytes()
        assert first[:8] == b"QHDSNAP\x00"
        s = read_snapshot(out / "snap_00000.qhd")
        assert s.grid.dim == 2 and s.grid.N == 16 and s.grid.L == pytest.approx(2 * math.pi)

    def test_report_regenerates_csv(self, tmp_path):
        out = tmp_path / "r"
        main(["simulate", "--grid", "16", "--tmax", "0.2", "--hbar", "0.05", "--out", str(out)])
        original = (out / "energy_report.csv").read_text()
        (out / "energy_report.csv").unlink()
        assert main(["report", "--grid", "16", "--hbar", "0.05", "--out", str(out)]) == EXIT_OK
        with open(out / "energy_report.csv") as fh:
            regen = list(csv.reader(fh))
        orig = list(csv.reader(original.splitlines()))
        assert regen[0] == orig[0]
        np.testing.assert_allclose(np.array(regen[1:], float), np.array(orig[1:], float), rtol=1e-12, atol=1e-14)
        with open(out / "profiles.csv") as fh:
            head = next(csv.reader(fh))
        assert head == ["time", "x", "rho", "u0", "theta"]

    def test_report_without_snapshots(self, tmp_path):
        assert main(["report", "--out", str(tmp_path / "empty")]) == EXIT_CONFIG

    def test_mms_command(self, tmp_path, capsys):
        assert main(["mms", "--out", str(tmp_path)]) == EXIT_OK
        with open(tmp_path / "mms.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["term", "err_n16", "err_n32", "ratio"]
        assert len(rows) == 13

    def test_limit_study_small(self, tmp_path):
        out = tmp_path / "ls"
        code = main(["limit-study", "--grid", "16", "--tmax", "0.2", "--hbar-list", "0,0.05,0.1", "--out", str(out)])
        assert code == EXIT_OK
        with open(out / "family.csv") as fh:
            rows = list(csv.reader(fh))
        assert tuple(rows[0]) == FAMILY_COLUMNS
        assert [float(r[0]) for r in rows[1:]] == [0.05, 0.1]
        assert "skipped" in (out / "fit_report.txt").read_text()
