import itertools
import os
import subprocess
import sys

import numpy as np
import pytest

from ncmoments import kernels
from ncmoments.gadgets import compact_family, full_cycle_family
from ncmoments.reconstruction import make_norm_oracle

from conftest import random_matrix

needs_numba = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba unavailable")


def _grid_args(rng, n=2, d=2, p=1.5, q=5):
    fam = compact_family(n)
    elems = [random_matrix(rng, d) for _ in range(n)]
    word = [(j + 1, j % 2 == 1) for j in range(n)]
    oracle = make_norm_oracle(fam, elems, word, p)
    r = oracle.admissible_radius() / 2
    return oracle._terms, oracle._stars, p, r, q


class TestNumpyKernels:
    def test_chain_traces_against_direct(self, rng):
        mats = np.stack([random_matrix(rng, 3) for _ in range(4)])
        orders = np.array(list(itertools.permutations(range(4))), dtype=np.int64)
        got = kernels.chain_traces_numpy(mats, orders)
        for row, value in zip(orders, got):
            prod = mats[row[0]]
            for idx in row[1:]:
                prod = prod @ mats[idx]
            assert abs(value - np.trace(prod) / 3) < 1e-12

    def test_schatten_batch(self, rng):
        mats = np.stack([random_matrix(rng, 3) for _ in range(5)])
        got = kernels.schatten_pp_batch_numpy(mats, 1.7)
        for m, value in zip(mats, got):
            s = np.linalg.svd(m, compute_uv=False)
            assert abs(value - np.mean(s**1.7)) < 1e-12

    def test_grid_phase_mean_against_loop(self, rng):
        terms, stars, p, r, q = _grid_args(rng)
        got = kernels.grid_phase_mean_numpy(terms, stars, p, r, q)
        n, d, _ = terms.shape
        omega = np.exp(2j * np.pi / q)
        acc = 0.0
        for digits in itertools.product(range(q), repeat=n):
            smat = np.eye(d, dtype=complex)
            phase = 1.0
            for j, m in enumerate(digits):
                z = r * omega**m
                smat = smat + z * terms[j]
                phase *= omega**m if stars[j] else omega ** (-m)
            svals = np.linalg.svd(smat, compute_uv=False)
            acc += np.mean(svals**p) * phase
        # the loop accumulates the full power; the kernel accumulates the
        # deviation from 1, whose phase average is identical
        assert abs(got - acc / q**n) < 1e-12


@needs_numba
class TestBackendAgreement:
    def test_chain_traces(self, rng):
        for fam in (full_cycle_family(5), compact_family(6)):
            mats = fam.stacked()
            n = fam.n
            orders = np.array(
                list(itertools.permutations(range(n))), dtype=np.int64
            )
            a = kernels.chain_traces_numba(mats, orders)
            b = kernels.chain_traces_numpy(mats, orders)
            assert np.abs(a - b).max() < 1e-12

    def test_grid_phase_mean(self, rng):
        for n, d, q in ((1, 2, 5), (2, 3, 7), (3, 2, 5)):
            terms, stars, p, r, _ = _grid_args(rng, n=n, d=d)
            a = kernels.grid_phase_mean_numba(terms, stars, p, r, q)
            b = kernels.grid_phase_mean_numpy(terms, stars, p, r, q)
            assert abs(a - b) < 1e-13

    def test_schatten_batch(self, rng):
        mats = np.stack([random_matrix(rng, 4) for _ in range(6)])
        a = kernels.schatten_pp_batch_numba(mats, 2.3)
        b = kernels.schatten_pp_batch_numpy(mats, 2.3)
        assert np.abs(a - b).max() < 1e-12


class TestBackendSelection:
    def test_env_flag_forces_numpy(self):
        code = (
            "from ncmoments import kernels; "
            "assert kernels.BACKEND == 'numpy'; "
            "assert kernels.chain_traces is kernels.chain_traces_numpy"
        )
        env = dict(os.environ, NCMOMENTS_BACKEND="numpy")
        subprocess.run([sys.executable, "-c", code], check=True, env=env)

    def test_bad_flag_rejected(self):
        code = "import ncmoments.kernels"
        env = dict(os.environ, NCMOMENTS_BACKEND="cuda")
        proc = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True
        )
        assert proc.returncode != 0

    def test_default_matches_availability(self):
        want = "numba" if kernels.HAVE_NUMBA else "numpy"
        env = dict(os.environ)
        env.pop("NCMOMENTS_BACKEND", None)
        code = f"from ncmoments import kernels; assert kernels.BACKEND == '{want}'"
        subprocess.run([sys.executable, "-c", code], check=True, env=env)
