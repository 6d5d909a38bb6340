import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhd import spectral as sp
from qhd.fields import make_grid


def naive_derivative(f, L):
    """O(N^2) direct-summation DFT derivative with the Nyquist mode dropped."""
    N = f.size
    j = np.arange(N)
    m = np.where(j < N // 2, j, j - N)
    E = np.exp(-2j * np.pi * np.outer(m, j) / N)
    fh = E @ f
    ik = 1j * 2 * np.pi / L * m
    ik[m == -N // 2] = 0
    return np.real(np.conj(E).T @ (ik * fh)) / N


def truncated_product(f, g, keep):
    """Exact Fourier coefficients of f*g by direct convolution, truncated to |m| <= keep."""
    N = f.size
    fh = np.fft.fft(f) / N
    gh = np.fft.fft(g) / N
    m = np.fft.fftfreq(N, 1.0 / N).astype(int)
    ph = {}
    for a, ca in zip(m, fh):
        for b, cb in zip(m, gh):
            ph[a + b] = ph.get(a + b, 0) + ca * cb
    out = np.zeros(N, dtype=complex)
    for k, c in ph.items():
        if abs(k) <= keep:
            out[k % N] += c
    return np.real(np.fft.ifft(out) * N)


class TestAnalytic:
    def test_grad_sin(self, grid1):
        (x,) = grid1.coords()
        assert np.abs(sp.grad(np.sin(x), grid1)[0] - np.cos(x)).max() <= 1e-10

    def test_grad_const(self, grid_any):
        out = sp.grad(np.full(grid_any.shape, 3.7), grid_any)
        assert np.abs(out).max() == 0

    def test_laplacian_grad_sin(self, grid1):
        (x,) = grid1.coords()
        assert np.abs(sp.laplacian_grad(np.sin(x), grid1)[0] + np.cos(x)).max() <= 1e-10

    def test_hessian_const(self, grid_any):
        assert np.abs(sp.hessian(np.ones(grid_any.shape), grid_any)).max() == 0

    def test_every_monomial_below_cutoff(self, grid_any):
        xs = grid_any.coords()
        for m in range(grid_any.cutoff + 1):
            for j in range(grid_any.dim):
                f = np.cos(m * xs[j])
                df = -m * np.sin(m * xs[j])
                assert np.abs(sp.partial(f, grid_any, j) - df).max() <= 1e-10
                assert np.abs(sp.laplacian(f, grid_any) + m**2 * f).max() <= 1e-10 * max(1, m**2)
                H = sp.hessian(f, grid_any)
                assert np.abs(H[j, j] + m**2 * f).max() <= 1e-10 * max(1, m**2)

    def test_mixed_hessian(self, grid2):
        x, y = grid2.coords()
        H = sp.hessian(np.sin(2 * x) * np.cos(3 * y), grid2)
        assert np.abs(H[0, 1] + 6 * np.cos(2 * x) * np.sin(3 * y)).max() <= 1e-10
        assert np.abs(H[0, 1] - H[1, 0]).max() == 0

    def test_nyquist_dropped_in_first_derivative(self):
        g = make_grid(1, 2 * np.pi, 16)
        (x,) = g.coords()
        assert np.abs(sp.grad(np.cos(8 * x), g)).max() < 1e-13


class TestOracles:
    @pytest.mark.parametrize("L", [2 * np.pi, 1.0, 7.5])
    def test_grad_matches_naive_dft(self, rng, L):
        g = make_grid(1, L, 32)
        f = rng.standard_normal(32)  # includes the Nyquist mode
        assert np.abs(sp.grad(f, g)[0] - naive_derivative(f, L)).max() <= 1e-10

    def test_grad_div_composition(self, grid_any, rng):
        v = sp.random_field(grid_any, rng, ncomp=grid_any.dim)
        a = sp.grad_div(v, grid_any)
        b = sp.grad(sp.divergence(v, grid_any), grid_any)
        assert np.abs(a - b).max() <= 1e-12 * np.abs(a).max()

    def test_laplacian_grad_is_grad_laplacian(self, grid_any, rng):
        f = sp.random_field(grid_any, rng)
        a = sp.laplacian_grad(f, grid_any)
        b = sp.grad(sp.laplacian(f, grid_any), grid_any)
        assert np.abs(a - b).max() <= 1e-12 * np.abs(a).max()

    def test_laplacian_is_div_grad(self, grid_any, rng):
        f = sp.random_field(grid_any, rng)
        a = sp.laplacian(f, grid_any)
        assert np.abs(a - sp.divergence(sp.grad(f, grid_any), grid_any)).max() <= 1e-12 * np.abs(a).max()

    def test_trace_hessian_is_laplacian(self, grid_any, rng):
        f = sp.random_field(grid_any, rng)
        H = sp.hessian(f, grid_any)
        lap = sp.laplacian(f, grid_any)
        assert np.abs(np.trace(H) - lap).max() <= 1e-12 * np.abs(lap).max()

    def test_vector_laplacian_componentwise(self, grid2, rng):
        v = sp.random_field(grid2, rng, ncomp=2)
        lv = sp.laplacian(v, grid2)
        for i in range(2):
            np.testing.assert_allclose(lv[i], sp.laplacian(v[i], grid2), atol=1e-12)


class TestDealias:
    def test_band_limited_unchanged(self, grid_any, rng):
        f = sp.random_field(grid_any, rng)
        assert np.abs(sp.dealias(f, grid_any) - f).max() <= 1e-14

    def test_nyquist_removed(self):
        g = make_grid(1, 2 * np.pi, 32)
        (x,) = g.coords()
        assert np.abs(sp.dealias(np.cos(16 * x), g)).max() <= 1e-15

    def test_mask_threshold(self):
        g = make_grid(1, 2 * np.pi, 30)
        (x,) = g.coords()
        # N divisible by 3: |m| = N/3 would alias onto itself, so it is dropped too
        assert np.abs(sp.dealias(np.sin(9 * x), g) - np.sin(9 * x)).max() < 1e-13
        assert np.abs(sp.dealias(np.sin(10 * x), g)).max() < 1e-13

    def test_idempotent(self, grid_any, rng):
        f = rng.standard_normal(grid_any.shape)
        once = sp.dealias(f, grid_any)
        assert np.abs(sp.dealias(once, grid_any) - once).max() <= 1e-14

    @pytest.mark.parametrize("N", [32, 48, 64])
    def test_product_matches_truncated_convolution(self, rng, N):
        g = make_grid(1, 2 * np.pi, N)
        a = sp.random_field(g, rng)
        b = sp.random_field(g, rng)
        expected = truncated_product(a, b, g.cutoff)
        assert np.abs(sp.dealias(a * b, g) - expected).max() <= 1e-12


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    dim=st.sampled_from([1, 2]),
    L=st.floats(0.5, 20.0),
)
def test_parseval(seed, dim, L):
    g = make_grid(dim, L, 16)
    f = np.random.default_rng(seed).standard_normal(g.shape)
    lhs = np.sum(f**2)
    assert abs(lhs - sp.energy_spectrum_sum(f, g)) <= 1e-12 * lhs


@settings(max_examples=30, deadline=None)
@given(m=st.integers(0, 10), phase=st.floats(0, 2 * np.pi), L=st.floats(0.5, 20.0))
def test_monomials_property(m, phase, L):
    g = make_grid(1, L, 32)
    (x,) = g.coords()
    k = 2 * np.pi * m / L
    f = np.sin(k * x + phase)
    scale = max(1.0, k**3)
    assert np.abs(sp.grad(f, g)[0] - k * np.cos(k * x + phase)).max() <= 1e-10 * scale
    assert np.abs(sp.laplacian_grad(f, g)[0] + k**3 * np.cos(k * x + phase)).max() <= 1e-10 * scale
