"""Benchmark the compiled stepping kernels against the NumPy fallback.

Usage: python benchmarks/bench_backends.py [--repeats 3]

Times the three hot loops (seeded angle pair, single-mode Bloch pair,
isotropic multimode ensemble) on both backends and prints a speedup table.
The compiled extension must have been built for the comparison to run;
otherwise only the fallback rows appear.
"""

import argparse
import time

import numpy as np

from gravmix import kernels
from gravmix.core import TimeGrid
from gravmix.meanfield import beams_ensemble, isotropic_ensemble, run_multimode, run_single_mode
from gravmix.seeded import BeamPair, run_seeded

CASES = [
    (
        "seeded angles (25k steps)",
        lambda: run_seeded(BeamPair(512, 512, 1e-4, 1e-4), TimeGrid.to(25.0, 1e-3, 25)),
    ),
    (
        "single-mode pair (20k steps)",
        lambda: run_single_mode(512.0, 1.0, 0.3, TimeGrid.to(20.0, 1e-3, 20)),
    ),
    (
        "beams ensemble (50k steps)",
        lambda: run_multimode(beams_ensemble(512.0, 1.0), TimeGrid.to(50.0, 1e-3, 50)),
    ),
    (
        "isotropic m=64 (50k steps)",
        lambda: run_multimode(isotropic_ensemble(512.0, 64, 1.0), TimeGrid.to(50.0, 1e-3, 50)),
    ),
]


def time_case(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = kernels.available_backends()
    print(f"available backends: {', '.join(backends)}")
    header = f"{'case':<32}" + "".join(f"{b:>12}" for b in backends)
    if "compiled" in backends and "python" in backends:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))

    for name, fn in CASES:
        row = f"{name:<32}"
        timings = {}
        for backend in backends:
            with kernels.use_backend(backend):
                timings[backend] = time_case(fn, args.repeats)
            row += f"{timings[backend] * 1e3:>10.1f}ms"
        if "compiled" in timings and "python" in timings:
            row += f"{timings['python'] / timings['compiled']:>9.1f}x"
        print(row)

    # Cross-backend agreement on a representative trajectory.
    if "compiled" in backends and "python" in backends:
        grid = TimeGrid.to(20.0, 1e-3, 20)
        with kernels.use_backend("compiled"):
            a = run_single_mode(512.0, 1.0, 0.3, grid)
        with kernels.use_backend("python"):
            b = run_single_mode(512.0, 1.0, 0.3, grid)
        print(f"\nmax |zeta difference| between backends: {np.max(np.abs(a.zeta - b.zeta)):.2e}")


if __name__ == "__main__":
    main()
