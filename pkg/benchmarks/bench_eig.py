"""Compare the compiled and pure-Python Jacobi kernels on batched Hermitian stacks.

Usage: python3 benchmarks/bench_eig.py [--batch 64] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from hhverify import _jacobi_py
from hhverify.generators import gen_hermitian

try:
    from hhverify import _jacobi_ext
except ImportError:
    _jacobi_ext = None


def stack(n, batch, seed=0):
    rng = np.random.default_rng(seed)
    return np.stack([gen_hermitian(rng, n) for _ in range(batch)])


def bench(fn, h, repeat):
    number = max(1, int(0.2 / max(timeit.timeit(lambda: fn(h), number=1), 1e-6)))
    best = min(timeit.repeat(lambda: fn(h), number=number, repeat=repeat)) / number
    return best / h.shape[0]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--batch", type=int, default=64)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    print(f"{'n':>3} {'python us/mat':>14} {'cython us/mat':>14} {'speedup':>8} {'max |dlam|':>11}")
    for n in (2, 4, 8, 16):
        h = stack(n, args.batch)
        t_py = bench(_jacobi_py.jacobi_eigh_batch, h, args.repeat)
        if _jacobi_ext is None:
            print(f"{n:>3} {t_py * 1e6:>14.1f} {'n/a':>14}")
            continue
        t_cy = bench(_jacobi_ext.jacobi_eigh_batch, h, args.repeat)
        lam_py = np.sort(_jacobi_py.jacobi_eigh_batch(h)[0], axis=1)
        lam_cy = np.sort(_jacobi_ext.jacobi_eigh_batch(h)[0], axis=1)
        diff = float(np.max(np.abs(lam_py - lam_cy)))
        print(f"{n:>3} {t_py * 1e6:>14.1f} {t_cy * 1e6:>14.1f} {t_py / t_cy:>8.1f} {diff:>11.2e}")


if __name__ == "__main__":
    main()
