import numpy as np
import pytest

from qhd.fields import PhysParams
from qhd.mms import DEFAULT_MMS_PARAMS, exact_terms, manufactured_state, mms_table, numeric_terms, term_errors


@pytest.fixture(scope="module")
def table():
    return mms_table()


def test_every_group_converges_spectrally(table):
    for row in table:
        assert row.passed, (row.term, row.errors)


def test_fine_grid_near_roundoff(table):
    for row in table:
        assert row.errors[-1] < 1e-8, row.term


def test_groups_listed(table):
    names = {r.term for r in table}
    assert {"bohm", "quantum_heat", "viscous_heating", "rhs_u", "rhs_theta"} <= names


def test_fields_periodic_and_small():
    s = manufactured_state(32, DEFAULT_MMS_PARAMS)
    assert s.min_density() > 0.75
    assert np.abs(s.u).max() < 0.3


def test_quantum_groups_vanish_classically():
    p = PhysParams(0.0, 1.0, 0.3, 0.7)
    s = manufactured_state(16, p)
    num, ex = numeric_terms(s, p), exact_terms(s, p)
    for name in ("bohm", "quantum_heat"):
        assert not np.any(num[name]) and not np.any(ex[name])


def test_hbar_scaling_of_bohm_error():
    # the Bohm group is linear in hbar^2, so its error is too
    a = term_errors(16, PhysParams(1.0, 1.0, 0.3, 0.7))["bohm"]
    b = term_errors(16, PhysParams(0.5, 1.0, 0.3, 0.7))["bohm"]
    assert b / a == pytest.approx(0.25, rel=1e-6)
