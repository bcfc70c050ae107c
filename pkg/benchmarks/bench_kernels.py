#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Times the two hot paths: loess smoothing (the inner loop of the seasonal
decomposition) and a full Mamdani evaluate (membership sampling, clipped
max-accumulation, centroid). Run from the repository root:

    python benchmarks/bench_kernels.py [--repeats N]
"""

from __future__ import annotations

import argparse
import importlib
import time

import numpy as np


def load_backends():
    backends = {}
    from fuzzwell import _kernels_py
    backends["numpy"] = _kernels_py
    try:
        _kernels = importlib.import_module("fuzzwell._kernels")
        backends["compiled"] = _kernels
    except ImportError:
        print("note: compiled kernels unavailable; benchmarking NumPy only")
    return backends


def best_of(repeats, fn, *args):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_loess(kernels, repeats):
    rng = np.random.default_rng(0)
    results = {}
    for n, window in ((2_000, 15), (20_000, 101)):
        y = np.cumsum(rng.normal(0, 1, n))
        rw = np.ones(n)
        for name, mod in kernels.items():
            dt = best_of(repeats, mod.loess, y, window, 1, rw, False)
            results[(f"loess n={n} w={window}", name)] = dt
    return results


def bench_mamdani(kernels, repeats):
    xs = np.linspace(0.0, 100.0, 1001)
    shapes = [(0, 0.0, 0.0, 50.0, 0.0), (0, 0.0, 50.0, 100.0, 0.0),
              (0, 50.0, 100.0, 100.0, 0.0)]
    rng = np.random.default_rng(1)
    alphas = rng.uniform(0.05, 1.0, size=(400, 27))
    results = {}
    for name, mod in kernels.items():
        terms = [mod.mf_grid(k, p0, p1, p2, p3, xs)
                 for k, p0, p1, p2, p3 in shapes]

        def run():
            for row in alphas:
                acc = np.zeros(1001)
                for i, a in enumerate(row):
                    mod.clip_accumulate(acc, terms[i % 3], a)
                mod.centroid_moments(xs, acc)

        dt = best_of(repeats, run)
        results[("mamdani 400 evals x 27 rules", name)] = dt
    return results


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    kernels = load_backends()
    rows = {}
    rows.update(bench_loess(kernels, args.repeats))
    rows.update(bench_mamdani(kernels, args.repeats))

    cases = sorted({case for case, _ in rows})
    print(f"{'case':<32} {'numpy':>10} {'compiled':>10} {'speedup':>8}")
    for case in cases:
        t_np = rows.get((case, "numpy"))
        t_c = rows.get((case, "compiled"))
        np_ms = f"{t_np * 1e3:.2f}ms" if t_np else "-"
        c_ms = f"{t_c * 1e3:.2f}ms" if t_c else "-"
        speed = f"{t_np / t_c:.2f}x" if (t_np and t_c) else "-"
        print(f"{case:<32} {np_ms:>10} {c_ms:>10} {speed:>8}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
