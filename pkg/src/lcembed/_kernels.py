"""Hot inner loops, compiled with numba when available.

Each kernel exists twice: a plain numpy implementation (always importable)
and an ``@njit`` twin.  The module-level names point at the compiled versions
unless numba is missing or ``LCEMBED_DISABLE_NUMBA`` is set to a truthy value
before import.  Both sets stay reachable through :data:`numpy_impl` and
:data:`numba_impl` so tests and the benchmark can compare them directly.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

_DISABLE = os.environ.get("LCEMBED_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is an optional extra
    _numba = None
else:
    # the bundled TBB is often too old; skip straight to OpenMP / workqueue
    _numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

HAVE_NUMBA = _numba is not None
USING_NUMBA = HAVE_NUMBA and not _DISABLE


# ---------------------------------------------------------------------------
# numpy reference implementations
# ---------------------------------------------------------------------------

def _np_window_sums(x, y, m, sides):
    """Best atom mass captured by a closed square of each side.

    For side ``h`` the square is ``[0, h] x [y_i, y_i + h]`` with its bottom
    edge on some atom ordinate ``y_i``.  Returns ``(best_mass, best_index)``
    per side; ``best_index`` is -1 when no atom fits.
    """
    nh = sides.shape[0]
    best = np.zeros(nh)
    arg = np.full(nh, -1, dtype=np.int64)
    if x.shape[0] == 0:
        return best, arg
    gaps = y[None, :] - y[:, None]
    for k in range(nh):
        h = sides[k]
        inside = (gaps >= 0.0) & (gaps <= h) & (x <= h)[None, :]
        masses = inside.astype(np.float64) @ m
        i = int(np.argmax(masses))
        if masses[i] > 0.0:
            best[k] = masses[i]
            arg[k] = i
    return best, arg


def _np_inv_abs2_sums(w, s, m):
    """``sum_j m_j / |w_i + s_j|^2`` for every evaluation point ``w_i``."""
    if s.shape[0] == 0:
        return np.zeros(w.shape[0])
    d = np.abs(w[:, None] + s[None, :]) ** 2
    return (m[None, :] / d).sum(axis=1)


def _np_halfplane_log_modulus(z, zeros):
    """``log|B(z)|`` for the half-plane Blaschke product with given zeros."""
    if zeros.shape[0] == 0:
        return np.zeros(z.shape[0])
    num = 4.0 * zeros.real[None, :] * z.real[:, None]
    den = np.abs(z[:, None] + np.conj(zeros)[None, :]) ** 2
    dist2 = np.abs(z[:, None] - zeros[None, :]) ** 2
    return 0.5 * _np_log_ratio(num / den, dist2, den).sum(axis=1)


def _np_log_ratio(q, dist2, den):
    # log(1 - q) two ways: log1p is exact near |B| = 1, the direct ratio near a zero
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(q < 0.5, np.log1p(-np.minimum(q, 0.5)), np.log(dist2) - np.log(den))


def _np_disc_log_modulus(z, zeros):
    """``log|B(z)|`` for the disc Blaschke product with given zeros."""
    if zeros.shape[0] == 0:
        return np.zeros(z.shape[0])
    a = zeros[None, :]
    zz = z[:, None]
    num = (1.0 - np.abs(a) ** 2) * (1.0 - np.abs(zz) ** 2)
    den = np.abs(1.0 - np.conj(a) * zz) ** 2
    dist2 = np.abs(zz - a) ** 2
    return 0.5 * _np_log_ratio(num / den, dist2, den).sum(axis=1)


numpy_impl = SimpleNamespace(
    window_sums=_np_window_sums,
    inv_abs2_sums=_np_inv_abs2_sums,
    halfplane_log_modulus=_np_halfplane_log_modulus,
    disc_log_modulus=_np_disc_log_modulus,
)


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAVE_NUMBA:
    from numba import njit, prange

    @njit(parallel=True, cache=True)
    def _nb_window_sums(x, y, m, sides):
        nh = sides.shape[0]
        n = x.shape[0]
        best = np.zeros(nh)
        arg = np.full(nh, -1, dtype=np.int64)
        for k in prange(nh):
            h = sides[k]
            bm = 0.0
            bi = -1
            for i in range(n):
                yi = y[i]
                acc = 0.0
                for j in range(n):
                    g = y[j] - yi
                    if g >= 0.0 and g <= h and x[j] <= h:
                        acc += m[j]
                if acc > bm:
                    bm = acc
                    bi = i
            best[k] = bm
            arg[k] = bi
        return best, arg

    @njit(parallel=True, cache=True)
    def _nb_inv_abs2_sums(w, s, m):
        nw = w.shape[0]
        out = np.zeros(nw)
        for i in prange(nw):
            acc = 0.0
            wr = w[i].real
            wi = w[i].imag
            for j in range(s.shape[0]):
                dr = wr + s[j].real
                di = wi + s[j].imag
                acc += m[j] / (dr * dr + di * di)
            out[i] = acc
        return out

    @njit(parallel=True, cache=True)
    def _nb_halfplane_log_modulus(z, zeros):
        nz = z.shape[0]
        out = np.zeros(nz)
        for i in prange(nz):
            acc = 0.0
            zr = z[i].real
            zi = z[i].imag
            for j in range(zeros.shape[0]):
                ar = zeros[j].real
                ai = zeros[j].imag
                dr = zr + ar
                di = zi - ai
                den = dr * dr + di * di
                q = 4.0 * ar * zr / den
                if q < 0.5:
                    acc += np.log1p(-q)
                else:
                    er = zr - ar
                    acc += np.log(er * er + di * di) - np.log(den)
            out[i] = 0.5 * acc
        return out

    @njit(parallel=True, cache=True)
    def _nb_disc_log_modulus(z, zeros):
        nz = z.shape[0]
        out = np.zeros(nz)
        for i in prange(nz):
            acc = 0.0
            zi = z[i]
            rz = 1.0 - abs(zi) ** 2
            for j in range(zeros.shape[0]):
                a = zeros[j]
                den = abs(1.0 - np.conj(a) * zi) ** 2
                q = (1.0 - abs(a) ** 2) * rz / den
                if q < 0.5:
                    acc += np.log1p(-q)
                else:
                    acc += np.log(abs(zi - a) ** 2) - np.log(den)
            out[i] = 0.5 * acc
        return out

    numba_impl = SimpleNamespace(
        window_sums=_nb_window_sums,
        inv_abs2_sums=_nb_inv_abs2_sums,
        halfplane_log_modulus=_nb_halfplane_log_modulus,
        disc_log_modulus=_nb_disc_log_modulus,
    )
else:  # pragma: no cover
    numba_impl = None


_active = numba_impl if USING_NUMBA else numpy_impl


def backend_name() -> str:
    return "numba" if USING_NUMBA else "numpy"


def set_threads(n: int) -> None:
    """Forward a thread count to numba's parallel layer (no-op without numba)."""
    if USING_NUMBA and n > 0:
        _numba.set_num_threads(min(int(n), _numba.config.NUMBA_NUM_THREADS))


def window_sums(x, y, m, sides):
    return _active.window_sums(
        np.ascontiguousarray(x, dtype=np.float64),
        np.ascontiguousarray(y, dtype=np.float64),
        np.ascontiguousarray(m, dtype=np.float64),
        np.ascontiguousarray(sides, dtype=np.float64),
    )


def inv_abs2_sums(w, s, m):
    return _active.inv_abs2_sums(
        np.ascontiguousarray(w, dtype=np.complex128),
        np.ascontiguousarray(s, dtype=np.complex128),
        np.ascontiguousarray(m, dtype=np.float64),
    )


def halfplane_log_modulus(z, zeros):
    return _active.halfplane_log_modulus(
        np.ascontiguousarray(z, dtype=np.complex128),
        np.ascontiguousarray(zeros, dtype=np.complex128),
    )


def disc_log_modulus(z, zeros):
    return _active.disc_log_modulus(
        np.ascontiguousarray(z, dtype=np.complex128),
        np.ascontiguousarray(zeros, dtype=np.complex128),
    )
