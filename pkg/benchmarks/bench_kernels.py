"""Time the numba kernels against the pure-numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--sizes 40,80,160] [--repeat 5]

Both paths run in this process; ``RIGIDMETRIC_NUMBA`` is toggled around
each timing and outputs are compared for equality.
"""

from __future__ import annotations

import argparse
import os
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np

from rigidmetric import _kernels

GRID = (Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2))


def random_weights(n: int, rng: random.Random, degree: int = 4) -> tuple[np.ndarray, int]:
    """Connected random graph with grid weights (scaled by 2), as an int64 matrix."""
    inf = 10 * n * 4
    W = np.full((n, n), inf, dtype=np.int64)
    np.fill_diagonal(W, 0)
    for i in range(1, n):
        j = rng.randrange(i)
        W[i, j] = W[j, i] = int(2 * rng.choice(GRID))
    for _ in range(n * degree // 2):
        i, j = rng.sample(range(n), 2)
        W[i, j] = W[j, i] = int(2 * rng.choice(GRID))
    return W, inf


@contextmanager
def numba_flag(on: bool):
    old = os.environ.get("RIGIDMETRIC_NUMBA")
    os.environ["RIGIDMETRIC_NUMBA"] = "1" if on else "0"
    try:
        yield
    finally:
        if old is None:
            del os.environ["RIGIDMETRIC_NUMBA"]
        else:
            os.environ["RIGIDMETRIC_NUMBA"] = old


def best_of(fn, repeat: int) -> tuple[float, object]:
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def compare(name: str, fn, repeat: int) -> None:
    with numba_flag(True):
        fn()  # compile
        t_fast, a = best_of(fn, repeat)
    with numba_flag(False):
        t_slow, b = best_of(fn, repeat)
    same = all(np.array_equal(x, y) for x, y in zip(a, b)) if isinstance(a, list) else np.array_equal(a, b)
    print(f"{name:<34} numba {t_fast * 1e3:9.2f} ms   numpy {t_slow * 1e3:9.2f} ms   "
          f"x{t_slow / max(t_fast, 1e-9):6.1f}   equal={same}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="40,80,160")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    print(f"numba available: {_kernels.HAVE_NUMBA}")
    for n in (int(s) for s in args.sizes.split(",")):
        W, inf = random_weights(n, rng)
        compare(f"floyd_warshall n={n}", lambda: _kernels.floyd_warshall(W, inf), args.repeat)

        D = _kernels.floyd_warshall(W, inf)
        compare(f"triangle_violations n={n}", lambda: _kernels.triangle_violations(D), args.repeat)

        k = 4
        A = np.array(D[:k, :k])
        cand = np.ones((k, n), dtype=bool)
        order = np.arange(k, dtype=np.int64)
        compare(
            f"search_embeddings {k} -> {n}",
            lambda: _kernels.search_embeddings(A, D, cand, order, -1),
            max(1, args.repeat // 2),
        )

if __name__ == "__main__":
    main()
