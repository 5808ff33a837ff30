"""Time the numba and numpy kernel backends on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--scale 1]

Prints one row per kernel with the best wall time of each backend, the
speedup and the max relative difference between their outputs.
"""

import argparse
import time

import numpy as np

from lcembed import _kernels


def _best(fn, args, repeat):
    fn(*args)  # warm-up (includes JIT compile)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def _cases(scale, rng):
    n_atoms = 400 * scale
    x, y, m = rng.uniform(0, 5, n_atoms), rng.normal(scale=5, size=n_atoms), rng.uniform(0, 1, n_atoms)
    sides = np.geomspace(1e-2, 50, 60)
    w = rng.uniform(1e-3, 5, 20000 * scale) + 1j * rng.normal(size=20000 * scale)
    s = rng.uniform(1e-3, 5, 200) + 1j * rng.normal(size=200)
    zeros = rng.uniform(0.05, 4, 16) + 1j * rng.uniform(-4, 4, 16)
    r = np.sqrt(rng.uniform(0, 0.99, 20000 * scale))
    zd = r * np.exp(2j * np.pi * rng.uniform(size=r.size))
    dz = 0.9 * np.sqrt(rng.uniform(size=16)) * np.exp(2j * np.pi * rng.uniform(size=16))
    return {
        "window_sums": (x, y, m, sides),
        "inv_abs2_sums": (w, s, rng.uniform(0, 1, 200)),
        "halfplane_log_modulus": (w, zeros),
        "disc_log_modulus": (zd, dz),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--scale", type=int, default=1)
    args = ap.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        print("numba is not installed; nothing to compare")
        return 1
    rng = np.random.default_rng(0)
    print(f"{'kernel':<24}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}{'max rel diff':>15}")
    for name, inputs in _cases(args.scale, rng).items():
        tn, on = _best(getattr(_kernels.numpy_impl, name), inputs, args.repeat)
        tj, oj = _best(getattr(_kernels.numba_impl, name), inputs, args.repeat)
        a, b = (on[0], oj[0]) if isinstance(on, tuple) else (on, oj)
        diff = float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)))
        print(f"{name:<24}{1e3 * tn:>12.3f}{1e3 * tj:>12.3f}{tn / tj:>10.1f}{diff:>15.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
