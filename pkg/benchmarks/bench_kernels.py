#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallbacks.

Run:  python3 benchmarks/bench_kernels.py [--repeats 5]

Covers the two hot loops: the roots-of-unity grid sweep behind moment
reconstruction and the permutation product sweep behind cyclic-trace
verification.  The numpy fallback of the grid sweep batches everything
through LAPACK, so on a single core the two backends are close there;
the permutation sweep is loop-bound and is where the jit pays off.
"""

from __future__ import annotations

import argparse
import itertools
import time

import numpy as np

from ncmoments import kernels
from ncmoments.gadgets import compact_family, full_cycle_family
from ncmoments.reconstruction import make_norm_oracle


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_grid(repeats: int) -> list[tuple[str, float, float, int]]:
    rng = np.random.default_rng(0)
    rows = []
    for n, d, q in ((2, 3, 7), (3, 3, 9), (4, 3, 5), (4, 3, 11)):
        fam = compact_family(n)
        elems = []
        for _ in range(n):
            m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            elems.append(m / np.linalg.norm(m, 2))
        word = [(j + 1, j % 2 == 0) for j in range(n)]
        oracle = make_norm_oracle(fam, elems, word, 1.5)
        r = oracle.admissible_radius() / 2
        terms, stars = oracle._terms, oracle._stars
        args = (terms, stars, 1.5, r, q)
        if kernels.HAVE_NUMBA:
            kernels.grid_phase_mean_numba(*args)  # compile outside the timer
            a = kernels.grid_phase_mean_numba(*args)
            b = kernels.grid_phase_mean_numpy(*args)
            assert abs(a - b) < 1e-12, (a, b)
            t_numba = _time(lambda: kernels.grid_phase_mean_numba(*args), repeats)
        else:
            t_numba = float("nan")
        t_numpy = _time(lambda: kernels.grid_phase_mean_numpy(*args), repeats)
        rows.append((f"grid n={n} d={d} q={q} ({q**n} pts)", t_numba, t_numpy, q**n))
    return rows


def bench_chains(repeats: int) -> list[tuple[str, float, float, int]]:
    rows = []
    for n, kind in ((7, "full"), (8, "compact"), (8, "full")):
        fam = full_cycle_family(n) if kind == "full" else compact_family(n)
        mats = fam.stacked()
        perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
        if kernels.HAVE_NUMBA:
            kernels.chain_traces_numba(mats, perms[:10])
            a = kernels.chain_traces_numba(mats, perms)
            b = kernels.chain_traces_numpy(mats, perms)
            assert np.abs(a - b).max() < 1e-12
            t_numba = _time(lambda: kernels.chain_traces_numba(mats, perms), repeats)
        else:
            t_numba = float("nan")
        t_numpy = _time(lambda: kernels.chain_traces_numpy(mats, perms), repeats)
        rows.append(
            (f"chains n={n} {kind} ({len(perms)} perms)", t_numba, t_numpy, len(perms))
        )
    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    print(f"selected backend: {kernels.BACKEND} (numba available: {kernels.HAVE_NUMBA})")
    print(f"{'case':38s} {'numba':>12s} {'numpy':>12s} {'speedup':>8s}")
    for label, t_numba, t_numpy, _ in bench_grid(args.repeats) + bench_chains(
        args.repeats
    ):
        ratio = t_numpy / t_numba if t_numba == t_numba else float("nan")
        print(f"{label:38s} {t_numba*1e3:10.2f}ms {t_numpy*1e3:10.2f}ms {ratio:7.2f}x")


if __name__ == "__main__":
    main()
