"""Benchmark the jit kernels against the pure-numpy fallbacks.

Usage:
    python3 benchmarks/bench_kernels.py

The package selects its path at import time (BRANCHKNOT_NO_NUMBA=1 forces
the fallback); this script times both implementations side by side in one
process and checks they agree.
"""

import time

import numpy as np

from branchknot import _kernels
from branchknot._kernels import _linking_sum_np, _newton_double_points_np


def timeit(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def newton_workload(n=20000):
    # perturbed cusp (z^2, z^3 - 3 t^2 z), seeds scattered in the disk
    t = 0.05
    fco = np.zeros((4, 4), np.complex128)
    fco[0, 2] = 1.0
    fco[2, 1] = -3 * t * t
    fco[2, 3] = 1.0
    fpc = np.zeros((4, 4), np.complex128)
    fpc[0, 1] = 2.0
    fpc[2, 0] = -3 * t * t
    fpc[2, 2] = 3.0
    rng = np.random.default_rng(1)
    z1 = 0.3 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    z2 = 0.3 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    return z1, z2, fco, fpc


def linking_workload(n=1500):
    th = 2 * np.pi * np.arange(n) / n
    P = np.stack([np.cos(th), np.sin(th), 0.1 * np.sin(3 * th)], axis=1)
    Q = np.stack([1 + np.cos(th), 0.1 * np.sin(2 * th), np.sin(th)], axis=1)
    return P, Q


def main():
    print(f"numba available: {_kernels.HAS_NUMBA}")

    z1, z2, fco, fpc = newton_workload()
    t_np, (a2, b2, r2, ok2) = timeit(
        _newton_double_points_np, z1, z2, fco, fpc, 1e-12, 50)
    print(f"newton batch ({z1.size} seeds)   numpy: {t_np * 1e3:9.1f} ms")
    if _kernels.HAS_NUMBA:
        t_nb, (a1, b1, r1, ok1) = timeit(
            _kernels.newton_double_points, z1, z2, fco, fpc, 1e-12, 50)
        agree = np.array_equal(ok1, ok2)
        print(f"newton batch ({z1.size} seeds)   numba: {t_nb * 1e3:9.1f} ms "
              f"(x{t_np / t_nb:.1f}, flags agree: {agree})")

    P, Q = linking_workload()
    t_np, lk_np = timeit(_linking_sum_np, P, Q)
    print(f"linking sum ({P.shape[0]}^2 pairs) numpy: {t_np * 1e3:9.1f} ms "
          f"(lk = {lk_np:.6f})")
    if _kernels.HAS_NUMBA:
        t_nb, lk_nb = timeit(_kernels.linking_sum, P, Q)
        print(f"linking sum ({P.shape[0]}^2 pairs) numba: {t_nb * 1e3:9.1f} ms "
              f"(x{t_np / t_nb:.1f}, |diff| = {abs(lk_nb - lk_np):.2e})")


if __name__ == "__main__":
    main()
