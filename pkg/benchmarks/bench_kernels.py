#!/usr/bin/env python3
"""Compare the compiled kernels against the pure-numpy fallback.

Times the three hot entry points on representative workloads (the sizes of
the acceptance sweeps) and prints one table. Run from a checkout with the
extension built:

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from heisgeo import _kernels_py
from heisgeo.geodesics import alpha
from heisgeo.rng import child_rng
from heisgeo.sampling import random_ic

try:
    from heisgeo import _kernels_cy
except ImportError:
    _kernels_cy = None


def batch(p, m, seed=0):
    ics = [random_ic(child_rng(seed, i), p) for i in range(m)]
    states0 = np.stack([ic.state() for ic in ics])
    alphas = np.array([alpha(ic) for ic in ics])
    return states0, alphas


def timed(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def workloads():
    s3, a3 = batch(3, 300)
    ts = np.arange(-100, 101) * 0.1
    yield (
        "closed_form_batch   (m=300, p=3, 201 times)",
        lambda mod: mod.closed_form_batch(s3, a3, ts, 3),
    )
    s2, _ = batch(2, 100)
    yield (
        "rk4_analytic_batch  (m=100, p=2, 5000 steps)",
        lambda mod: mod.rk4_analytic_batch(s2, 2, 1e-3, 5000, 50),
    )
    s1, _ = batch(1, 64)
    yield (
        "rk4_christoffel     (m=64,  p=1,  500 steps)",
        lambda mod: mod.rk4_christoffel_batch(s1, 1, 1.0, 1e-5, 1e-2, 500, 10),
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3, help="timing repetitions")
    args = parser.parse_args()

    if _kernels_cy is None:
        print("compiled backend not built; timing the python backend only\n")

    header = f"{'workload':<46} {'python':>10} {'cython':>10} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, call in workloads():
        t_py = timed(lambda: call(_kernels_py), args.repeat)
        if _kernels_cy is not None:
            t_cy = timed(lambda: call(_kernels_cy), args.repeat)
            ref = call(_kernels_py)
            out = call(_kernels_cy)
            scale = 1.0 + np.abs(ref)
            drift = float(np.max(np.abs(ref - out) / scale))
            assert drift < 1e-9, f"backend mismatch on {name}: {drift}"
            print(f"{name:<46} {t_py * 1e3:>8.1f}ms {t_cy * 1e3:>8.1f}ms {t_py / t_cy:>8.1f}x")
        else:
            print(f"{name:<46} {t_py * 1e3:>8.1f}ms {'-':>10} {'-':>9}")


if __name__ == "__main__":
    main()
