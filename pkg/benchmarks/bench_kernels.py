#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallbacks.

Runs the two hot loops on synthetic workloads sized like the acceptance
suite: compensated prefix sums over reciprocal weights, and the log-domain
weighted-interval-scheduling DP.  The dispatched path honors WSVAR_NO_NUMBA,
so with that flag set both columns time the fallback.
"""

import time

import numpy as np

from wsvar import _kernels


def timeit(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_prefix_sums(n):
    terms = 1.0 / np.arange(1, n + 1, dtype=np.float64)
    _kernels.prefix_sums(terms[:16], 0.0, 0.0)  # JIT warmup
    t_fast = timeit(_kernels.prefix_sums, terms, 0.0, 0.0)
    t_py = timeit(_kernels._prefix_sums_py, terms, 0.0, 0.0)
    return t_fast, t_py


def bench_wis_dp(e, instances):
    rng = np.random.default_rng(0)
    cases = []
    for _ in range(instances):
        xs = np.sort(rng.uniform(0, 1, e))
        vals = rng.uniform(-1, 1, e)
        q = rng.uniform(1, 50)
        diff = np.abs(vals[None, :] - vals[:, None])
        with np.errstate(divide="ignore"):
            gains = q * np.log(diff)
        length = rng.uniform(0.02, 0.3)
        pred = np.full(e, -1, dtype=np.int64)
        for j in range(e):
            feas = np.flatnonzero(xs[j] - xs >= length)
            if feas.size:
                pred[j] = feas[-1]
        cases.append((gains, pred))
    _kernels.wis_dp(*cases[0])  # JIT warmup

    def run(fn):
        for gains, pred in cases:
            fn(gains, pred)

    return timeit(run, _kernels.wis_dp), timeit(run, _kernels._wis_dp_py)


def main():
    print(f"dispatched backend: {_kernels.backend()}")
    print(f"{'kernel':<34}{'dispatched':>12}{'numpy-py':>12}{'speedup':>9}")
    for n in (1 << 20, 1 << 22):
        fast, py = bench_prefix_sums(n)
        print(f"{'prefix_sums n=%d' % n:<34}{fast:>11.4f}s{py:>11.4f}s"
              f"{py / fast:>8.1f}x")
    for e, inst in ((20, 2000), (40, 1000)):
        fast, py = bench_wis_dp(e, inst)
        label = f"wis_dp E={e} x{inst}"
        print(f"{label:<34}{fast:>11.4f}s{py:>11.4f}s{py / fast:>8.1f}x")


if __name__ == "__main__":
    main()
