#!/usr/bin/env python3
"""Benchmark: compiled vs pure escape engine on slice grids.

Runs the same Green-value grid through both engines (and a threaded compiled
pass) and reports wall times, speedup, and a bit-equality check of the value
arrays.

    python benchmarks/bench_grid.py [--size 256] [--maxiter 1000]
"""

import argparse
import time

from henongreen import kernels
from henongreen.algebra import Poly1
from henongreen.maps import HenonFactor, HenonMap
from henongreen.render import SliceSpec, sample_grid

MAPS = {
    "quadratic": HenonMap((HenonFactor(Poly1([0, 0, 1]), 1),)),
    "two-factor-deg6": HenonMap(
        (HenonFactor(Poly1([0, 0, 2]), 1), HenonFactor(Poly1([0, 1, 0, 1]), 2))
    ),
}


def run(size: int, maxiter: int) -> None:
    spec = SliceSpec(
        base=(0, 0), e1=(0, 1), e2=(0, 1j), bounds=(-2, 2, -2, 2), resolution=(size, size)
    )
    print(f"grid {size}x{size}, maxiter {maxiter}, active engine: {kernels.engine_name()}")
    header = f"{'map':>16} {'pure':>9} {'compiled':>9} {'comp x4':>9} {'speedup':>8}  equal"
    print(header)
    print("-" * len(header))
    for name, h in MAPS.items():
        t0 = time.perf_counter()
        pure = sample_grid(h, spec, 1e-10, maxiter, force_engine="pure")
        t1 = time.perf_counter()
        if kernels.have_compiled():
            comp = sample_grid(h, spec, 1e-10, maxiter, force_engine="compiled")
            t2 = time.perf_counter()
            comp4 = sample_grid(h, spec, 1e-10, maxiter, workers=4, force_engine="compiled")
            t3 = time.perf_counter()
            equal = pure.value_bytes() == comp.value_bytes() == comp4.value_bytes()
            print(
                f"{name:>16} {t1 - t0:>8.3f}s {t2 - t1:>8.3f}s {t3 - t2:>8.3f}s "
                f"{(t1 - t0) / (t2 - t1):>7.1f}x  {equal}"
            )
        else:
            print(f"{name:>16} {t1 - t0:>8.3f}s {'n/a':>9} {'n/a':>9} {'n/a':>8}  n/a")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=256)
    ap.add_argument("--maxiter", type=int, default=1000)
    args = ap.parse_args()
    run(args.size, args.maxiter)
