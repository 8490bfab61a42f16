#!/usr/bin/env python3
"""Benchmark the compiled kernel against the pure-Python fallback.

Times the hot kernels on representative workloads: raw sector-table
evaluation and full cascade integrations on the built-in families.  Run
after an editable install:

    python benchmarks/bench_backends.py [--quick]
"""

import argparse
import math
import time

import numpy as np

from pwavg import averaging, backend, examples


def _instances():
    lc = examples.build_example(
        "linear-center-4z",
        {"a": [[1.0, 1.0, 1.0, 1.0], [0.3, -0.2, 0.5, 0.1]],
         "b": [[0.2, -0.4, 0.3, -math.pi], [0.1, 0.2, -0.3, 0.4]]})
    qz = examples.build_example(
        "quadratic-isochronous-nz",
        {"n": 6, "a": [0.3, -0.7, 0.2, 0.4, -0.1, 0.5],
         "b": [0.1, 0.4, -0.3, 0.2, 0.6, -0.2],
         "c": [-0.2, 0.5, 0.6, -0.4, 0.3, 0.1]})
    return lc, qz


def bench_tables(kernel, reps):
    lc, _ = _instances()
    fld = lc.standard.sectors[0]
    handle = fld.handle(kernel)
    thetas = np.linspace(0.01, 1.5, reps)
    t0 = time.perf_counter()
    for th in thetas:
        kernel.field_table(handle, float(th), 1.3, 2, 2)
    return (time.perf_counter() - t0) / reps


def bench_cascade_k1(kernel, reps):
    lc, _ = _instances()
    rhos = np.linspace(0.5, 2.5, reps)
    t0 = time.perf_counter()
    for rho in rhos:
        averaging.averaged(lc.standard, 1, float(rho), kernel=kernel)
    return (time.perf_counter() - t0) / reps


def bench_cascade_k2(kernel, reps):
    lc, _ = _instances()
    rhos = np.linspace(0.5, 2.5, reps)
    t0 = time.perf_counter()
    for rho in rhos:
        averaging.averaged(lc.standard, 2, float(rho), kernel=kernel)
    return (time.perf_counter() - t0) / reps


def bench_quadratic(kernel, reps):
    _, qz = _instances()
    rhos = np.linspace(0.1, 0.85, reps)
    t0 = time.perf_counter()
    for rho in rhos:
        averaging.averaged(qz.standard, 1, float(rho), kernel=kernel)
    return (time.perf_counter() - t0) / reps


WORKLOADS = [
    ("sector table (k=2)", bench_tables, 20000, 2000),
    ("cascade f1, linear center", bench_cascade_k1, 100, 5),
    ("cascade f2, linear center", bench_cascade_k2, 50, 3),
    ("cascade f1, quadratic n=6", bench_quadratic, 30, 3),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true",
                    help="fewer repetitions")
    args = ap.parse_args()
    kernels = backend.kernels()
    if len(kernels) < 2:
        print("compiled kernel not available; nothing to compare")
    names = [k.NAME for k in kernels]
    print(f"backends: {', '.join(names)} (default: {backend.BACKEND_NAME})")
    print(f"{'workload':<30} " + " ".join(f"{n + ' [ms/op]':>16}"
                                          for n in names) + f" {'speedup':>9}")
    for label, fn, reps_c, reps_py in WORKLOADS:
        times = []
        for k in kernels:
            reps = reps_c if k.NAME == "c" else reps_py
            if args.quick:
                reps = max(2, reps // 10)
            times.append(fn(k, reps))
        row = f"{label:<30} " + " ".join(f"{t * 1e3:>16.4f}" for t in times)
        if len(times) == 2:
            row += f" {times[1] / times[0]:>8.1f}x"
        print(row)


if __name__ == "__main__":
    main()
