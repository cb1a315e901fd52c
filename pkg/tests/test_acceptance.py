"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line with its measured values (run
pytest with -s or -rA to see them), and asserts the stated tolerance.
"""

import time

import numpy as np
import pytest

from ncmoments.algebra import matrix_unit, normalized_trace, word_trace
from ncmoments.combinatorics import (
    alpha_count,
    coefficient_root_report,
    generalized_binomial,
    moment_coefficient,
    star_patterns,
)
from ncmoments.corners import (
    corner_embed,
    corner_quadruple,
    cycle_polynomial_P,
    cycle_polynomial_closed,
    four_term_defect,
    poly_eval,
    psi_eval,
    psi_eval_series,
    psi_ode_residual,
    psi_tail_nonnegative,
    psi_tail_sign,
    recover_even_norm_of,
    truncation_remainder,
)
from ncmoments.distribution import (
    complete_isometry_probe,
    conjugation_map,
    distributions_match,
    reconstruct_moment_table,
    transpose_map,
    adjoint_defect,
    multiplicativity_defect,
)
from ncmoments.evenp import (
    PreconditionFailedError,
    direct_even_norm,
    even_p_transfer_check,
    expand_even_norm,
)
from ncmoments.gadgets import compact_family, full_cycle_family, verify_cyclic_trace
from ncmoments.reconstruction import (
    gram_deviation_coefficient,
    recover_moment,
    slot_word,
)

SEED = 20260809


def _report(number: int, passed: bool, detail: str):
    print(f"CRITERION {number:2d} {'PASS' if passed else 'FAIL'}: {detail}")
    assert passed, f"criterion {number}: {detail}"


def _random_matrix(rng, dim, norm_cap=1.0):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return m / max(np.linalg.norm(m, 2) / norm_cap, 1e-12)


def _random_unitary(rng, dim):
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_criterion_01_gadget_property():
    start = time.perf_counter()
    worst = 0.0
    for n in range(1, 9):
        for fam in (full_cycle_family(n), compact_family(n)):
            rep = verify_cyclic_trace(fam)
            worst = max(worst, rep.max_deviation)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 60.0
    _report(1, ok, f"max deviation {worst:.2e} over n<=8 in {elapsed:.1f}s")


def test_criterion_02_word_coefficient_identity():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for n in range(1, 5):
        fam = compact_family(n)
        for _ in range(20):
            elems = [_random_matrix(rng, 2, 2.0) for _ in range(n)]
            for stars in star_patterns(n):
                word = slot_word(stars)
                tau = word_trace(elems, word)
                alpha = alpha_count(stars)
                for k in range(n + 1):
                    got = normalized_trace(
                        gram_deviation_coefficient(fam, elems, word, k)
                    )
                    want = tau * k * generalized_binomial(alpha, n - k)
                    worst = max(worst, abs(got - want))
    _report(2, worst <= 1e-9, f"worst coefficient gap {worst:.2e}")


def test_criterion_03_moment_reconstruction():
    rng = np.random.default_rng(SEED + 1)
    p_grid = (1.0, 1.5, 3.0, float(np.pi))
    start = time.perf_counter()
    worst = 0.0
    for trial in range(50):
        n = 1 + trial % 3
        d = 2 + (trial // 3) % 2
        p = p_grid[trial % 4]
        fam = compact_family(n)
        elems = [_random_matrix(rng, d) for _ in range(n)]
        word = [(j + 1, bool(rng.integers(0, 2))) for j in range(n)]
        est = recover_moment(fam, elems, word, p)
        worst = max(worst, abs(est.value - word_trace(elems, word)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-4 and elapsed < 600.0
    _report(3, ok, f"worst |estimate - trace| {worst:.2e} over 50 instances "
                  f"in {elapsed:.1f}s")


def test_criterion_04_closed_form_coefficients():
    worst = 0.0
    for p in np.linspace(8.0 / 100, 8.0, 100):
        worst = max(worst, abs(moment_coefficient(p, 2, 1) - p * p / 4))
        want4 = p * p * (p / 2 - 1) * (p / 2 - 2) / 24
        worst = max(worst, abs(moment_coefficient(p, 4, 1) - want4))
    _report(4, worst <= 1e-12, f"worst closed-form gap {worst:.2e} on 100-point grid")


def test_criterion_05_nonvanishing():
    worst_root = 0.0
    for n in range(1, 11):
        for alpha in range(0, n // 2 + 1):
            rep = coefficient_root_report(n, alpha)
            worst_root = max(worst_root, max(rep.evaluations, default=0.0))
    smallest = np.inf
    for p in (0.5, 1.0, 1.5, 3.0, float(np.pi), 5.5):
        for n in range(1, 11):
            for alpha in range(0, n // 2 + 1):
                smallest = min(smallest, abs(moment_coefficient(p, n, alpha)))
    ok = worst_root <= 1e-8 and smallest > 1e-12
    _report(5, ok, f"worst root value {worst_root:.2e}, "
                   f"smallest coefficient magnitude {smallest:.2e}")


def test_criterion_06_psi_suite():
    worst_ode = 0.0
    for p in (0.5, 1.0, 3.0, 5.0):
        for t in np.geomspace(1e-3, 50.0, 120):
            res = psi_ode_residual(t, p)
            worst_ode = max(worst_ode, abs(res) / (1.0 + psi_eval(t, p)))
    worst_series = 0.0
    for p in (0.5, 1.0, 3.0, 5.0):
        for t in np.linspace(0.0, 3.5, 100):
            worst_series = max(
                worst_series, abs(psi_eval(t, p) - psi_eval_series(t, p))
            )
    worst_sign = 0.0
    t_grid = np.geomspace(100.0 / 200, 100.0, 200)
    for p in (0.5, 1.0, 3.0, 5.0):
        for n_ord in range(0, 5):
            want = 1.0 if psi_tail_nonnegative(p, n_ord) else -1.0
            for t in t_grid:
                worst_sign = max(worst_sign, -want * psi_tail_sign(t, p, n_ord))
    ok = worst_ode <= 1e-7 and worst_series <= 1e-10 and worst_sign <= 1e-12
    _report(6, ok, f"ode {worst_ode:.2e}, series {worst_series:.2e}, "
                   f"sign violation {worst_sign:.2e}")


def test_criterion_07_cycle_polynomials_and_power_sums():
    worst_rec = 0.0
    for m in range(1, 13):
        coeffs = cycle_polynomial_P(m)
        for x in np.linspace(0.05, 3.0, 20):
            closed = cycle_polynomial_closed(m, x)
            worst_rec = max(
                worst_rec,
                abs(poly_eval(coeffs, x) - closed) / max(abs(closed), 1.0),
            )
    rng = np.random.default_rng(SEED + 2)
    worst_sum = 0.0
    for _ in range(5):
        a = corner_embed(_random_matrix(rng, 2, 2.0))
        quad = corner_quadruple(a)
        gram = a.conj().T @ a
        cogram = a @ a.conj().T
        for m in range(1, 7):
            total = sum(np.linalg.matrix_power(q, m) for q in quad)
            coeffs = cycle_polynomial_P(m)
            want = np.zeros_like(gram)
            for part in (gram, cogram):
                acc = np.zeros_like(part)
                for c in reversed(list(coeffs)):
                    acc = acc @ part + float(c) * np.eye(part.shape[0])
                want = want + 2 * acc
            worst_sum = max(worst_sum, float(np.linalg.norm(total - want, 2)))
    ok = worst_rec <= 1e-8 and worst_sum <= 1e-9
    _report(7, ok, f"recurrence gap {worst_rec:.2e}, power-sum gap {worst_sum:.2e}")


def test_criterion_08_even_norm_recovery():
    rng = np.random.default_rng(SEED + 3)
    worst = 0.0
    for trial in range(20):
        d = 2 + trial % 2
        x = _random_matrix(rng, d)
        a = corner_embed(x)
        for p in (1.0, 3.0):
            for n_ord in (1, 2):
                est, _ = recover_even_norm_of(a, p, n_ord)
                gram = a.conj().T @ a
                direct = float(
                    np.real(
                        normalized_trace(np.linalg.matrix_power(gram, n_ord))
                    )
                )
                worst = max(worst, abs(est - direct) / max(abs(direct), 1e-12))
    _report(8, worst <= 1e-3, f"worst relative recovery error {worst:.2e}")


def test_criterion_09_four_term():
    rng = np.random.default_rng(SEED + 4)
    worst = 0.0
    for p in (1.0, 1.7, 2.0, 3.0):
        for d in (2, 3):
            for _ in range(25):
                a = _random_matrix(rng, d, 2.0)
                worst = max(worst, -four_term_defect(a, p))
    counter = four_term_defect(np.array([[1.0]]), 0.5)
    counter_gap = abs(counter - (2.0**1.5 - 4.0))
    ok = worst <= 1e-10 and counter_gap <= 1e-12
    _report(9, ok, f"worst eigenvalue deficit {worst:.2e} over 200 samples, "
                   f"p=1/2 counterexample gap {counter_gap:.2e}")


def test_criterion_10_transposition_witness():
    u = transpose_map(2)
    rep1 = complete_isometry_probe(u, level=1, p=3.0, trials=200, seed=SEED)
    rep2 = complete_isometry_probe(u, level=2, p=3.0, trials=50, seed=SEED)
    ok = rep1.max_gap < 1e-10 and rep2.max_gap > 1e-3
    _report(10, ok, f"level-1 gap {rep1.max_gap:.2e}, "
                    f"level-2 witness gap {rep2.max_gap:.2e}")


def test_criterion_11_isomorphism_from_isometry():
    rng = np.random.default_rng(SEED + 5)
    d = 3
    fam = [_random_matrix(rng, d) for _ in range(3)]
    u_mat = _random_unitary(rng, d)
    images = [u_mat @ x @ u_mat.conj().T for x in fam]
    table_x = reconstruct_moment_table(fam, 4, 3.0, q=3)
    table_y = reconstruct_moment_table(images, 4, 3.0, q=3)
    rep = distributions_match(table_x, table_y, 5e-4)
    basis = [matrix_unit(d, i, j) for i in range(d) for j in range(d)]
    conj = conjugation_map(basis, u_mat)
    worst_defect = 0.0
    for a_idx in range(len(basis)):
        worst_defect = max(worst_defect, adjoint_defect(conj, a_idx))
    for a_idx, b_idx in ((0, 1), (1, 3), (4, 8), (2, 6)):
        worst_defect = max(
            worst_defect, multiplicativity_defect(conj, a_idx, b_idx, 3.0)
        )
    ok = rep.passed and worst_defect <= 1e-8
    _report(11, ok, f"degree-4 reconstructed table gap {rep.worst_gap:.2e}, "
                    f"worst defect {worst_defect:.2e}")


def test_criterion_12_even_p_expansion():
    rng = np.random.default_rng(SEED + 6)
    worst = 0.0
    for trial in range(100):
        m = 1 + trial % 3
        coeffs = [_random_matrix(rng, 2)]
        elems = [_random_matrix(rng, 2)]
        got = expand_even_norm(coeffs, elems, m)
        want = direct_even_norm(coeffs, elems, m)
        worst = max(worst, abs(got - want))
    xs = [_random_matrix(rng, 2) for _ in range(2)]
    u_mat = _random_unitary(rng, 2)
    ys = [u_mat @ x @ u_mat.conj().T for x in xs]
    transfer = even_p_transfer_check(xs, ys, 2, [1, 2, 3, 4], trials=3, seed=SEED)
    units = [matrix_unit(2, i, j) for i in range(2) for j in range(2)]
    tunits = [u.T.copy() for u in units]
    try:
        even_p_transfer_check(units, tunits, 2, [1], trials=1, seed=SEED)
        raised = False
    except PreconditionFailedError:
        raised = True
    ok = worst <= 1e-9 and transfer.passed and raised
    _report(12, ok, f"expansion gap {worst:.2e} over 100 trials, conjugated "
                    f"transfer gap {transfer.worst_norm_gap:.2e}, "
                    f"transposition precondition raised: {raised}")


def test_criterion_13_truncation_remainder():
    rng = np.random.default_rng(SEED + 7)
    worst_ratio = 0.0
    for _ in range(20):
        x = _random_matrix(rng, 2)
        for r in (1e-2, 5e-3):
            big = truncation_remainder(x, 3.0, 2, r)
            small = truncation_remainder(x, 3.0, 2, r / 2)
            if big > 1e-13:
                worst_ratio = max(worst_ratio, small / big)
    _report(13, worst_ratio <= 0.6, f"worst halving ratio {worst_ratio:.3f}")
