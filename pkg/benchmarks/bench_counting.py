#!/usr/bin/env python3
"""Benchmark the census backends: numba JIT kernels vs pure Python.

Generates ER graphs of growing size, runs both backends on each, verifies
they agree, and prints the timings and speedup.  The numba backend is
timed after a warm-up call so JIT compilation is excluded.

    python benchmarks/bench_counting.py [--quick]
"""

import argparse
import time

import numpy as np

from digraphlets.counting import census
from digraphlets.models import GeneratorSpec, generate


def time_backend(g, backend, repeats=1):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = census(g, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller sizes only")
    args = parser.parse_args()

    cases = [(100, 0.02), (200, 0.02), (400, 0.01)]
    if not args.quick:
        cases += [(800, 0.01), (1000, 0.01)]

    # warm up the JIT outside the timed region
    warm = generate(GeneratorSpec(model="er", n=60, density=0.05, seed=0))
    census(warm, backend="numba")

    print(f"{'n':>6} {'m':>7} {'subsets':>12} {'python (s)':>11} {'numba (s)':>10} {'speedup':>8}")
    for n, density in cases:
        g = generate(GeneratorSpec(model="er", n=n, density=density, seed=42))
        t_py, (sig_py, freq_py) = time_backend(g, "python")
        t_nb, (sig_nb, freq_nb) = time_backend(g, "numba", repeats=3)
        assert np.array_equal(sig_py, sig_nb) and np.array_equal(freq_py, freq_nb)
        print(
            f"{n:>6} {g.m:>7} {freq_py.sum():>12,} {t_py:>11.3f} {t_nb:>10.3f} "
            f"{t_py / t_nb:>7.1f}x"
        )


if __name__ == "__main__":
    main()
