import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhd.config import SimConfig
from qhd.errors import AllBelowNoiseFloor, InsufficientPoints, MisalignedTrajectories
from qhd.fields import PhysParams, State, make_grid
from qhd.initial import InitialSpec
from qhd.integrate import Trajectory
from qhd.limit import diff_norms, fit_power_law, fit_rate, hk_diff, run_family


class TestFit:
    @pytest.mark.parametrize("power", [1.0, 2.0, 4.0])
    def test_exact_power_law(self, power):
        h = np.array([0.02, 0.04, 0.08, 0.16])
        fit = fit_power_law(h, 3.7 * h**power)
        assert fit.slope == pytest.approx(power, abs=1e-10)
        assert fit.intercept == pytest.approx(np.log(3.7), abs=1e-9)
        assert fit.residual < 1e-10

    @settings(max_examples=30, deadline=None)
    @given(c=st.floats(1e-6, 1e3), h0=st.floats(1e-3, 0.5))
    def test_halving_hbar_quarters_quadratic_errors(self, c, h0):
        h = h0 * np.array([1, 2, 4, 8])
        e = c * h**2
        e_half = c * (h / 2) ** 2
        np.testing.assert_allclose(e_half / e, 0.25, rtol=1e-14)
        assert fit_power_law(h / 2, e_half).slope == pytest.approx(2, abs=1e-9)

    def test_noise_floor_exclusion(self):
        h = np.array([0.01, 0.02, 0.04, 0.08, 0.16])
        e = h**2
        fit = fit_power_law(h, e, noise_floor=0.0002 / 10 * 1.01)
        assert not fit.used[0] and fit.used[1:].all()

    def test_insufficient_points(self):
        with pytest.raises(InsufficientPoints):
            fit_power_law([0.1, 0.2, 0.3], [1, 2, 3])

    def test_all_below_floor(self):
        with pytest.raises(AllBelowNoiseFloor):
            fit_power_law([0.1, 0.2, 0.3, 0.4], [1e-14] * 4, noise_floor=1e-14)

    def test_rate_fit_summary(self):
        h = np.array([0.02, 0.04, 0.08, 0.16])
        r = fit_rate(h, h**2, h, 1e-15, 1e-15)
        assert r.slope_h1 == pytest.approx(2) and r.slope_h2 == pytest.approx(1)
        assert "slope_h1 = 2.000000" in r.summary()


def _traj(states):
    return Trajectory(states=states)


class TestDiffNorms:
    def test_self_is_zero(self, grid1, rng):
        from qhd.verify import random_state

        states = [random_state(grid1, rng).replace(time=t) for t in (0.0, 0.5)]
        d = diff_norms(_traj(states), _traj(states))
        assert d.sup_h1 == 0 and d.sup_h2 == 0

    def test_single_mode_closed_form(self):
        g = make_grid(1, 2 * np.pi, 32)
        (x,) = g.coords()
        a = 1e-3
        zero = State.zeros(g)
        other = State(g, a * np.sin(3 * x), g.zeros_vector(), g.zeros())
        # ||a sin 3x||^2 = a^2 pi, each derivative multiplies by 9
        assert hk_diff(other, zero, 1) == pytest.approx(a * np.sqrt(np.pi * (1 + 9)), rel=1e-13)
        assert hk_diff(other, zero, 2) == pytest.approx(a * np.sqrt(np.pi * (1 + 9 + 81)), rel=1e-13)

    def test_symmetric(self, grid2, rng):
        from qhd.verify import random_state

        A = [random_state(grid2, rng).replace(time=t) for t in (0.0, 1.0)]
        B = [random_state(grid2, rng).replace(time=t) for t in (0.0, 1.0)]
        np.testing.assert_allclose(diff_norms(_traj(A), _traj(B)).h2, diff_norms(_traj(B), _traj(A)).h2)

    def test_misaligned(self, grid1):
        a = [State.zeros(grid1, 0.0), State.zeros(grid1, 1.0)]
        with pytest.raises(MisalignedTrajectories):
            diff_norms(_traj(a), _traj(a[:1]))
        with pytest.raises(MisalignedTrajectories):
            diff_norms(_traj(a), _traj([State.zeros(grid1, 0.0), State.zeros(grid1, 0.9)]))
        g2 = make_grid(1, 2 * np.pi, 16)
        with pytest.raises(MisalignedTrajectories):
            diff_norms(_traj(a), _traj([State.zeros(g2, 0.0), State.zeros(g2, 1.0)]))


class TestFamily:
    def test_classical_only(self):
        cfg = SimConfig(N=32, t_max=0.2, output_every=0.1)
        fam = run_family(cfg, [0.0], workers=1)
        assert list(fam.runs) == [0.0]
        assert fam.hbars == []

    def test_zero_data_family(self):
        cfg = SimConfig(N=32, t_max=0.2, output_every=0.1, init=InitialSpec(eps=0.0))
        fam = run_family(cfg, [0.05, 0.1], workers=1)
        for tr in fam.runs.values():
            assert all(not s.rho.any() and not s.u.any() and not s.theta.any() for s in tr.states)

    def test_hbar_zero_member_matches_baseline(self):
        cfg = SimConfig(N=32, t_max=0.3, output_every=0.1, phys=PhysParams(0.0))
        fam = run_family(cfg, [0.0, 0.1], workers=1)
        from qhd.limit import _run_member
        from qhd.integrate import snapshot_times

        again = _run_member((fam.initial, PhysParams(0.0), snapshot_times(0.3, 0.1), fam.dt, True))
        d = diff_norms(again, fam.baseline)
        assert d.sup_h1 <= 1e-13

    def test_aligned_and_shared_dt(self):
        cfg = SimConfig(N=32, t_max=0.4, output_every=0.1)
        fam = run_family(cfg, [0.05, 0.2], workers=1)
        times = [tr.times for tr in fam.runs.values()]
        for t in times[1:]:
            np.testing.assert_array_equal(t, times[0])
        steps = {tr.n_steps for tr in fam.runs.values()}
        assert len(steps) == 1

    def test_parallel_matches_serial(self):
        cfg = SimConfig(N=32, t_max=0.2, output_every=0.1)
        a = run_family(cfg, [0.1], workers=1)
        b = run_family(cfg, [0.1], workers=2)
        for h in a.runs:
            assert a.runs[h].final.rho.tobytes() == b.runs[h].final.rho.tobytes()
