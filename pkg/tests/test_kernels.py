import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lcembed import _kernels

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")


def _points(rng, n, disc=False):
    if disc:
        r = np.sqrt(rng.uniform(0, 0.99, n))
        return r * np.exp(2j * np.pi * rng.uniform(size=n))
    return rng.uniform(1e-3, 5, n) + 1j * rng.normal(scale=3, size=n)


def test_window_sums_brute_force():
    rng = np.random.default_rng(1)
    x, y, m = rng.uniform(0, 4, 25), rng.uniform(-4, 4, 25), rng.uniform(0, 1, 25)
    sides = np.array([0.1, 0.5, 1.0, 3.0, 10.0])
    best, arg = _kernels.numpy_impl.window_sums(x, y, m, sides)
    for k, h in enumerate(sides):
        ref = max(m[(x <= h) & (y >= y0) & (y <= y0 + h)].sum() for y0 in y)
        assert best[k] == pytest.approx(ref, rel=1e-14)
        if best[k] > 0:
            y0 = y[arg[k]]
            assert m[(x <= h) & (y >= y0) & (y <= y0 + h)].sum() == pytest.approx(best[k], rel=1e-14)


def test_log_modulus_near_zero_and_boundary():
    zeros = np.array([1.0 + 0.5j, 2.0])
    z = np.array([1.0 + 0.5j + 1e-9, 1e-12 + 0.3j, 50.0 + 1j])
    direct = np.log(np.abs(np.prod((z[:, None] - zeros) / (z[:, None] + np.conj(zeros)), axis=1)))
    got = _kernels.numpy_impl.halfplane_log_modulus(z, zeros)
    assert np.allclose(got, direct, rtol=1e-8, atol=1e-14)


@needs_numba
@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 12))
def test_backends_agree(seed, n_zero):
    rng = np.random.default_rng(seed)
    np_, nb = _kernels.numpy_impl, _kernels.numba_impl
    x, y, m = rng.uniform(0, 3, 30), rng.normal(size=30), rng.uniform(0, 2, 30)
    sides = np.geomspace(1e-2, 10, 7)
    a, b = np_.window_sums(x, y, m, sides), nb.window_sums(x, y, m, sides)
    assert np.allclose(a[0], b[0], rtol=1e-13, atol=0)
    w, s = _points(rng, 40), _points(rng, 9)
    assert np.allclose(np_.inv_abs2_sums(w, s, m[:9]), nb.inv_abs2_sums(w, s, m[:9]), rtol=1e-13)
    zh, zd = _points(rng, n_zero), _points(rng, n_zero, True)
    ph, pd = _points(rng, 40), _points(rng, 40, True)
    assert np.allclose(np_.halfplane_log_modulus(ph, zh), nb.halfplane_log_modulus(ph, zh), rtol=1e-12, atol=1e-14)
    assert np.allclose(np_.disc_log_modulus(pd, zd), nb.disc_log_modulus(pd, zd), rtol=1e-12, atol=1e-14)


def test_backend_name():
    assert _kernels.backend_name() in ("numba", "numpy")
    _kernels.set_threads(1)
