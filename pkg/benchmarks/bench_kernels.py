"""Time the table-scan kernels under numba and under plain numpy.

A chain semilattice (merge = max) satisfies every property, so each scan
visits the whole table instead of stopping at an early counterexample.

    python3 benchmarks/bench_kernels.py --sizes 16 32 64 --repeat 3
"""
import argparse
import time

import numpy as np

from ontomerge._kernels import HAVE_NUMBA, KERNELS, run

ORDERED = {"lub", "compat_left", "compat_right"}


def chain(n: int):
    idx = np.arange(n)
    return np.maximum.outer(idx, idx).astype(np.int64), idx[:, None] <= idx[None, :]


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[16, 32, 64, 96])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    if not HAVE_NUMBA:
        print("numba not installed, timing numpy only")

    T, P = chain(4)
    for name in KERNELS:  # compile outside the timed region
        for b in backends:
            run(name, T, P if name in ORDERED else None, b)

    print(f"{'kernel':<14}{'n':>5}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for n in args.sizes:
        T, P = chain(n)
        for name in KERNELS:
            extra = P if name in ORDERED else None
            secs = {b: best_of(lambda: run(name, T, extra, b), args.repeat) for b in backends}
            row = f"{name:<14}{n:>5}" + "".join(f"{secs[b] * 1e3:>10.2f}ms" for b in backends)
            if "numba" in secs:
                row += f"{secs['numpy'] / max(secs['numba'], 1e-9):>9.1f}x"
            print(row)


if __name__ == "__main__":
    main()
