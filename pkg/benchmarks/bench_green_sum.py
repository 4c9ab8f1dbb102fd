"""Time the brute-force kernel sum: compiled core against the numpy fallback.

    python3 benchmarks/bench_green_sum.py [N ...]
"""

import argparse
import math
import time

import numpy as np

from wpfp import _accel, _core_py
from wpfp.kernel import coefficients_at
from wpfp.params import ParameterSet
from wpfp.phase_state import PhaseGrid, gaussian_state


def arguments(n, t=0.5):
    p = ParameterSet(1.0, 1.0, 0.0, 1.0)
    grid = PhaseGrid(1, n, n, 8.0, 8.0)
    w0 = gaussian_state(grid, 0.5, -0.5)
    kc = coefficients_at(p, t)
    period = 2 * grid.Lx
    return (np.ascontiguousarray(w0.values), grid.x, grid.v, grid.hx * grid.hv, period,
            (kc.nu_t / kc.f_t, kc.lambda_t / kc.f_t, kc.mu_t / kc.f_t),
            kc.growth, kc.back_shear, kc.growth / (2 * math.pi * math.sqrt(kc.f_t)), 2, 40.0)


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("sizes", nargs="*", type=int, default=[16, 32, 64])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"compiled core available: {_accel.BACKEND == 'compiled'}")
    print(f"{'N':>5} {'numpy [s]':>11} {'compiled [s]':>13} {'speedup':>8} {'max diff':>10}")
    for n in args.sizes:
        a = arguments(n)
        t_py, ref = best_of(_core_py.green_sum, a, args.repeat)
        if _accel.BACKEND == "compiled":
            t_c, out = best_of(_accel.green_sum, a, args.repeat)
            diff = float(np.max(np.abs(out - ref)))
            print(f"{n:>5} {t_py:>11.4f} {t_c:>13.4f} {t_py / t_c:>8.1f} {diff:>10.2e}")
        else:
            print(f"{n:>5} {t_py:>11.4f} {'-':>13} {'-':>8} {'-':>10}")


if __name__ == "__main__":
    main()
