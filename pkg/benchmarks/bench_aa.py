#!/usr/bin/env python3
"""Benchmark the batch anticipation kernels: numba vs numpy vs scalar Python.

Generates a synthetic corpus of alignment lines, packs it once, then times
each backend over the same arrays. The scalar path is the per-sentence
reference implementation the kernels must agree with. Run:

    python3 benchmarks/bench_aa.py --lines 200000 --repeats 5
"""

import argparse
import random
import time

import numpy as np

from monostream import _kernels
from monostream.monotonicity import Alignment, aa


def synthetic_links(n_lines: int, seed: int):
    rng = random.Random(seed)
    per_line = []
    for _ in range(n_lines):
        length = rng.randint(1, 40)
        links = {(rng.randint(0, 59), rng.randint(0, 59)) for _ in range(length)}
        per_line.append(tuple(links))
    return per_line


def time_backend(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--lines", type=int, default=200_000)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    per_line = synthetic_links(args.lines, args.seed)
    link_i, link_j, offsets = _kernels.pack_links(per_line)
    n_links = link_i.shape[0]
    print(f"{args.lines} lines, {n_links} links")

    results = {}
    results["numpy"] = time_backend(
        lambda: _kernels.aa_batch(link_i, link_j, offsets, backend="numpy"), args.repeats
    )
    if _kernels.HAS_NUMBA:
        warm = np.array([0], dtype=np.int64)
        _kernels.aa_batch(warm, warm, np.array([0, 1], dtype=np.int64), backend="numba")  # compile
        results["numba"] = time_backend(
            lambda: _kernels.aa_batch(link_i, link_j, offsets, backend="numba"), args.repeats
        )

    scalar_lines = per_line[: min(args.lines, 20_000)]

    def scalar_pass():
        for links in scalar_lines:
            if links:
                aa(Alignment(links, 60, 60))

    scalar_best = time_backend(scalar_pass, max(1, args.repeats // 2))
    results["python-scalar"] = scalar_best * (args.lines / len(scalar_lines))

    baseline = results["numpy"]
    print(f"{'backend':<15}{'best (s)':>12}{'lines/s':>14}{'vs numpy':>10}")
    for name, seconds in results.items():
        rate = args.lines / seconds
        print(f"{name:<15}{seconds:>12.4f}{rate:>14.0f}{baseline / seconds:>9.2f}x")

    if _kernels.HAS_NUMBA:
        a = _kernels.aa_batch(link_i, link_j, offsets, backend="numpy")
        b = _kernels.aa_batch(link_i, link_j, offsets, backend="numba")
        print("backends agree:", bool(np.array_equal(a, b, equal_nan=True)))


if __name__ == "__main__":
    main()
