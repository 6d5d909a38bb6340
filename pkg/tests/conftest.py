import numpy as np
import pytest

from qhd.fields import make_grid


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid1():
    return make_grid(1, 2 * np.pi, 32)


@pytest.fixture
def grid2():
    return make_grid(2, 2 * np.pi, 32)


@pytest.fixture(params=[1, 2, 3], ids=["1d", "2d", "3d"])
def grid_any(request):
    N = {1: 32, 2: 32, 3: 16}[request.param]
    return make_grid(request.param, 2 * np.pi, N)
