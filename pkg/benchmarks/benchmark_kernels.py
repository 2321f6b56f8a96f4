#!/usr/bin/env python3
"""Benchmark the compiled propagation kernels against the pure-numpy twins.

Runs propagate_pwc2 and overlap_grad_pwc2 on piecewise-constant controls of
several lengths with both backends and reports the median wall time per call
and the speedup.  Also cross-checks that the two backends agree numerically.

Usage: python3 benchmarks/benchmark_kernels.py [--repeats N]
"""

import argparse
import statistics
import time

import numpy as np

from robustpulse.kernels import pure


def load_fast():
    try:
        from robustpulse.kernels import _fast
    except ImportError:
        return None
    return _fast


def make_inputs(n, seed=0):
    rng = np.random.default_rng(seed)
    cx = rng.normal(0.0, 0.05, n)
    cy = rng.normal(0.0, 0.05, n)
    cz = rng.normal(0.0, 0.002, n)
    c0 = rng.normal(0.0, 0.002, n)
    dts = np.full(n, 3.52)
    target = np.eye(2, dtype=complex)
    return cx, cy, cz, c0, dts, target


def time_call(fn, args, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=200,
                        help="timing repeats per case (default 200)")
    args = parser.parse_args()

    fast = load_fast()
    if fast is None:
        print("compiled extension not available; showing pure backend only")

    header = f"{'kernel':<20}{'segments':>10}{'pure [us]':>12}"
    if fast is not None:
        header += f"{'fast [us]':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))

    for n in (16, 40, 160, 640):
        cx, cy, cz, c0, dts, target = make_inputs(n)
        cases = [("propagate_pwc2", (cx, cy, cz, c0, dts)),
                 ("overlap_grad_pwc2", (cx, cy, cz, c0, dts, target))]
        for name, call_args in cases:
            t_pure = time_call(getattr(pure, name), call_args, args.repeats)
            row = f"{name:<20}{n:>10}{t_pure * 1e6:>12.1f}"
            if fast is not None:
                t_fast = time_call(getattr(fast, name), call_args,
                                   args.repeats)
                row += f"{t_fast * 1e6:>12.1f}{t_pure / t_fast:>10.1f}x"
            print(row)

    if fast is not None:
        cx, cy, cz, c0, dts, target = make_inputs(160, seed=1)
        u_f = fast.propagate_pwc2(cx, cy, cz, c0, dts)
        u_p = pure.propagate_pwc2(cx, cy, cz, c0, dts)
        g_f = fast.overlap_grad_pwc2(cx, cy, cz, c0, dts, target)
        g_p = pure.overlap_grad_pwc2(cx, cy, cz, c0, dts, target)
        ok = (np.allclose(u_f, u_p, atol=1e-12)
              and abs(g_f[0] - g_p[0]) < 1e-12
              and np.allclose(g_f[1], g_p[1], atol=1e-12)
              and np.allclose(g_f[2], g_p[2], atol=1e-12))
        print(f"\nbackend agreement (atol 1e-12): {'OK' if ok else 'MISMATCH'}")


if __name__ == "__main__":
    main()
