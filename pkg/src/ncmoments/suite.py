"""Aggregated verification suite: every module's invariants as one run.

Each check measures a single deviation and compares it against a
tolerance (overridable per check).  Runs are deterministic in the
configured seed; records are sorted by name so report assembly does not
depend on execution order.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import algebra, combinatorics, corners, distribution, evenp, gadgets
from . import reconstruction as recon

DEFAULT_SEED = 20260809


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = DEFAULT_SEED
    p_grid: tuple[float, ...] = (1.0, 1.5, 3.0, float(np.pi))
    dim_caps: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    modules: tuple[str, ...] = ()
    output: str | None = None
    output_format: str = "json"

    def __post_init__(self):
        if not self.p_grid:
            raise ValueError("p_grid must be nonempty")
        if any(t < 0 for t in self.tolerances.values()):
            raise ValueError("tolerances must be nonnegative")
        if self.output_format not in ("json", "csv"):
            raise ValueError("output format must be json or csv")

    def cap(self, name: str, default: int) -> int:
        return int(self.dim_caps.get(name, default))

    @staticmethod
    def from_dict(raw: dict) -> "SuiteConfig":
        known = {
            "seed",
            "p_grid",
            "dim_caps",
            "tolerances",
            "modules",
            "output",
            "output_format",
        }
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        kwargs = dict(raw)
        if "p_grid" in kwargs:
            kwargs["p_grid"] = tuple(float(v) for v in kwargs["p_grid"])
        if "modules" in kwargs:
            kwargs["modules"] = tuple(kwargs["modules"])
        return SuiteConfig(**kwargs)

    @staticmethod
    def from_file(path) -> "SuiteConfig":
        return SuiteConfig.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class CheckRecord:
    name: str
    module: str
    anchor: str
    measured: float
    tolerance: float
    passed: bool
    runtime: float

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "module": self.module,
            "anchor": self.anchor,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "runtime_s": self.runtime,
        }


@dataclass(frozen=True)
class ReportDocument:
    records: tuple[CheckRecord, ...]
    config: SuiteConfig

    @property
    def n_passed(self) -> int:
        return sum(1 for r in self.records if r.passed)

    @property
    def all_passed(self) -> bool:
        return self.n_passed == len(self.records)

    def to_dict(self) -> dict:
        return {
            "records": [r.to_dict() for r in self.records],
            "summary": {
                "total": len(self.records),
                "passed": self.n_passed,
                "failed": len(self.records) - self.n_passed,
            },
            "config": {
                "seed": self.config.seed,
                "p_grid": list(self.config.p_grid),
                "modules": list(self.config.modules),
                "dim_caps": dict(self.config.dim_caps),
                "tolerances": dict(self.config.tolerances),
            },
        }

    def to_csv(self) -> str:
        lines = ["name,module,anchor,measured,tolerance,pass,runtime_s"]
        for r in self.records:
            lines.append(
                f"{r.name},{r.module},{r.anchor},{r.measured:.6e},"
                f"{r.tolerance:.3e},{int(r.passed)},{r.runtime:.3f}"
            )
        return "\n".join(lines) + "\n"


def _rand_matrix(rng, d: int, norm_cap: float = 1.0) -> np.ndarray:
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return m / max(np.linalg.norm(m, 2) / norm_cap, 1e-12)


# ---------------------------------------------------------------------------
# checks; each returns the measured deviation (pass iff <= tolerance)
# ---------------------------------------------------------------------------

def _check_trace_cyclicity(cfg: SuiteConfig) -> float:
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for d in (2, 3, cfg.cap("core", 5)):
        a = _rand_matrix(rng, d, 2.0)
        b = _rand_matrix(rng, d, 2.0)
        dev = abs(algebra.normalized_trace(a @ b) - algebra.normalized_trace(b @ a))
        scale = np.linalg.norm(a, 2) * np.linalg.norm(b, 2) * d
        worst = max(worst, dev / max(scale, 1e-30))
    return worst


def _check_profile_norm(cfg: SuiteConfig) -> float:
    rng = np.random.default_rng(cfg.seed + 1)
    worst = 0.0
    for p in cfg.p_grid:
        m = _rand_matrix(rng, cfg.cap("core", 5), 2.0)
        prof = algebra.singular_profile(m)
        worst = max(
            worst, abs(algebra.schatten_pp(m, p) - prof.power_integral(p))
        )
    return worst


def _check_singular_inequalities(cfg: SuiteConfig) -> float:
    rng = np.random.default_rng(cfg.seed + 2)
    d = cfg.cap("core", 5)
    worst = 0.0
    for _ in range(5):
        t_mat = _rand_matrix(rng, d, 2.0)
        s_mat = _rand_matrix(rng, d, 2.0)
        mu_t = algebra.singular_profile(t_mat).values
        mu_s = algebra.singular_profile(s_mat).values
        mu_sum = algebra.singular_profile(t_mat + s_mat).values
        mu_prod = algebra.singular_profile(t_mat @ s_mat).values
        mu_adj = algebra.singular_profile(t_mat.conj().T).values
        mu_abs = algebra.singular_profile(
            algebra.abs_power(t_mat, 1.0)
        ).values
        worst = max(worst, float(np.max(np.abs(mu_t - mu_adj))))
        worst = max(worst, float(np.max(np.abs(mu_t - mu_abs))))
        lam = complex(rng.normal(), rng.normal())
        mu_scaled = algebra.singular_profile(lam * t_mat).values
        worst = max(worst, float(np.max(np.abs(mu_scaled - abs(lam) * mu_t))))
        for i in range(d):
            for j in range(d - i):
                if i + j >= d:
                    continue
                worst = max(worst, mu_sum[i + j] - mu_t[i] - mu_s[j])
                worst = max(worst, mu_prod[i + j] - mu_t[i] * mu_s[j])
    return worst


def _check_hermitian_calculus(cfg: SuiteConfig) -> float:
    rng = np.random.default_rng(cfg.seed + 3)
    d = cfg.cap("core", 5)
    m = _rand_matrix(rng, d, 5.0)
    h = (m + m.conj().T) / 2
    ident = algebra.hermitian_apply(h, lambda w: w)
    worst = float(np.linalg.norm(ident - h, 2))
    sq = algebra.hermitian_apply(h, lambda w: w**2)
    composed = algebra.hermitian_apply(
        algebra.hermitian_apply(h, lambda w: w**2), lambda w: w + 1
    )
    direct = algebra.hermitian_apply(h, lambda w: w**2 + 1)
    worst = max(worst, float(np.linalg.norm(sq - h @ h, 2)))
    worst = max(worst, float(np.linalg.norm(composed - direct, 2)))
    return worst


def _check_gadget_families(cfg: SuiteConfig) -> float:
    worst = 0.0
    for n in range(1, cfg.cap("gadgets", 6) + 1):
        for fam in (gadgets.full_cycle_family(n), gadgets.compact_family(n)):
            rep = gadgets.verify_cyclic_trace(fam)
            worst = max(worst, rep.max_deviation)
    return worst


def _check_closed_form_coefficients(cfg: SuiteConfig) -> float:
    worst = 0.0
    for p in np.linspace(0.08, 8.0, 100):
        c2 = combinatorics.moment_coefficient(p, 2, 1)
        c4 = combinatorics.moment_coefficient(p, 4, 1)
        worst = max(worst, abs(c2 - p * p / 4.0))
        worst = max(
            worst, abs(c4 - p * p * (p / 2 - 1) * (p / 2 - 2) / 24.0)
        )
    return worst


def _check_coefficient_roots(cfg: SuiteConfig) -> float:
    worst = 0.0
    for n in range(1, 11):
        for alpha in range(0, n // 2 + 1):
            rep = combinatorics.coefficient_root_report(n, alpha)
            worst = max(worst, max(rep.evaluations, default=0.0))
    return worst


def _check_nonvanishing(cfg: SuiteConfig) -> float:
    smallest = np.inf
    for p in (0.5, 1.0, 1.5, 3.0, float(np.pi), 5.5):
        for n in range(1, 11):
            for alpha in range(0, n // 2 + 1):
                smallest = min(
                    smallest, abs(combinatorics.moment_coefficient(p, n, alpha))
                )
    # measured deviation: positive when some coefficient is too close to 0
    return max(0.0, 1e-12 - smallest)


def _check_binomial_identities(cfg: SuiteConfig) -> float:
    from fractions import Fraction

    worst = 0.0
    for n in range(1, 11):
        for alpha in range(0, n + 1):
            for k in range(0, n + 1):
                lhs = alpha * combinatorics.generalized_binomial(
                    alpha - 1, n - k
                ) + (n - alpha) * combinatorics.generalized_binomial(alpha, n - k)
                rhs = k * combinatorics.generalized_binomial(alpha, n - k)
                worst = max(worst, abs(lhs - rhs))
    for alpha in range(2, 11):
        for i in range(1, alpha):
            acc = Fraction(0)
            for k in range(alpha + 1):
                acc += (
                    Fraction(combinatorics.generalized_binomial(alpha, k))
                    * (-1) ** k
                    * k**i
                )
            worst = max(worst, abs(float(acc)))
    return worst


def _check_deviation_coefficients(cfg: SuiteConfig) -> float:
    rng = np.random.default_rng(cfg.seed + 4)
    worst = 0.0
    for n in range(1, 4):
        fam = gadgets.compact_family(n)
        elems = [_rand_matrix(rng, 2) for _ in range(n)]
        for stars in combinatorics.star_patterns(n):
            word = recon.slot_word(stars)
            tau = algebra.word_trace(elems, word)
            alpha = combinatorics.alpha_count(stars)
            for k in range(n + 1):
                mat = recon.gram_deviation_coefficient(fam, elems, word, k)
                want = tau * k * combinatorics.generalized_binomial(alpha, n - k)
                worst = max(worst, abs(algebra.normalized_trace(mat) - want))
    return worst


def _check_reconstruction(cfg: SuiteConfig) -> float:
    rng = np.random.default_rng(cfg.seed + 5)
    worst = 0.0
    trials = cfg.cap("reconstruction_trials", 8)
    for t in range(trials):
        n = int(rng.integers(1, 4))
        d = int(rng.integers(2, cfg.cap("reconstruction_dim", 3) + 1))
        p = float(cfg.p_grid[t % len(cfg.p_grid)])
        fam = gadgets.compact_family(n)
        elems = [_rand_matrix(rng, d) for _ in range(n)]
        word = [(j + 1, bool(rng.integers(0, 2))) for j in range(n)]
        est = recon.recover_moment(fam, elems, word, p)
        worst = max(worst, abs(est.value - algebra.word_trace(elems, word)))
    return worst


def _check_aliasing_order(cfg: SuiteConfig) -> float:
    rng = np.random.default_rng(cfg.seed + 6)
    n, d, p = 2, 2, max(cfg.p_grid[0], 1.0)
    fam = gadgets.compact_family(n)
    elems = [_rand_matrix(rng, d) for _ in range(n)]
    word = [(1, True), (2, False)]
    oracle = recon.make_norm_oracle(fam, elems, word, p)
    direct = algebra.word_trace(elems, word)
    coeff = combinatorics.moment_coefficient(p, n, 1)
    r0 = oracle.admissible_radius() / 2
    q = 2 * n + 3
    e1 = abs(recon.fourier_moment_estimate(oracle, word, r0, q) / coeff - direct)
    e2 = abs(
        recon.fourier_moment_estimate(oracle, word, r0 / 2, q) / coeff - direct
    )
    # order-2 error model: halving r must cut the error by at least 3.5x
    if e2 <= 1e-12:
        return 0.0
    return max(0.0, 3.5 - e1 / e2)


def _check_psi_ode(cfg: SuiteConfig) -> float:
    worst = 0.0
    for p in (0.5, 1.0, 3.0, 5.0):
        for t in np.geomspace(1e-3, 50.0, 60):
            res = corners.psi_ode_residual(t, p)
            worst = max(worst, abs(res) / (1.0 + corners.psi_eval(t, p)))
    return worst


def _check_psi_series(cfg: SuiteConfig) -> float:
    worst = 0.0
    for p in (0.5, 1.0, 3.0, 5.0):
        for t in np.linspace(0.0, 3.5, 40):
            worst = max(
                worst,
                abs(corners.psi_eval(t, p) - corners.psi_eval_series(t, p)),
            )
    return worst


def _check_psi_sign_rule(cfg: SuiteConfig) -> float:
    worst = 0.0
    for p in (0.5, 1.0, 3.0, 5.0):
        for n_ord in range(0, 5):
            expected = 1.0 if corners.psi_tail_nonnegative(p, n_ord) else -1.0
            for t in np.geomspace(1e-2, 100.0, 50):
                res = corners.psi_tail_sign(t, p, n_ord)
                worst = max(worst, -expected * res)
    return worst


def _check_cycle_polynomials(cfg: SuiteConfig) -> float:
    worst = 0.0
    for m in range(1, 13):
        coeffs = corners.cycle_polynomial_P(m)
        for x in np.linspace(0.05, 3.0, 20):
            rec = corners.poly_eval(coeffs, x)
            closed = corners.cycle_polynomial_closed(m, x)
            worst = max(worst, abs(rec - closed) / max(abs(closed), 1.0))
    return worst


def _check_power_sum_identity(cfg: SuiteConfig) -> float:
    rng = np.random.default_rng(cfg.seed + 7)
    worst = 0.0
    for _ in range(4):
        a = corners.corner_embed(_rand_matrix(rng, 2, 2.0))
        quad = corners.corner_quadruple(a)
        gram = a.conj().T @ a
        cogram = a @ a.conj().T
        for m in range(1, 7):
            total = sum(np.linalg.matrix_power(q, m) for q in quad)
            coeffs = corners.cycle_polynomial_P(m)
            want = 2 * _poly_on_matrix(coeffs, gram) + 2 * _poly_on_matrix(
                coeffs, cogram
            )
            worst = max(worst, float(np.linalg.norm(total - want, 2)))
    return worst


def _poly_on_matrix(coeffs, mat: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(mat)
    for c in reversed(list(coeffs)):
        acc = acc @ mat + float(c) * np.eye(mat.shape[0])
    return acc


def _check_four_function_identity(cfg: SuiteConfig) -> float:
    rng = np.random.default_rng(cfg.seed + 8)
    worst = 0.0
    for p in (0.3, 0.7):
        a = corners.corner_embed(_rand_matrix(rng, 2, 1.5))
        d = a.shape[0]
        eye = np.eye(d)
        lhs = sum(
            algebra.abs_power(eye + s * m, p)
            for s in (1.0, -1.0)
            for m in (a, a.conj().T)
        )
        gram = a.conj().T @ a
        cogram = a @ a.conj().T
        rhs = (
            2 * algebra.hermitian_apply(gram, lambda w: _psi_vec(w, p))
            + 2 * algebra.hermitian_apply(cogram, lambda w: _psi_vec(w, p))
            - 4 * eye
        )
        worst = max(worst, float(np.linalg.norm(lhs - rhs, 2)))
    return worst


def _psi_vec(w: np.ndarray, p: float) -> np.ndarray:
    return np.array([corners.psi_eval(max(t, 0.0), p) for t in w])


def _check_corner_scaling(cfg: SuiteConfig) -> float:
    rng = np.random.default_rng(cfg.seed + 9)
    worst = 0.0
    for q in (1.0, 2.0, 3.0, float(np.pi)):
        x = _rand_matrix(rng, 3, 2.0)
        a = corners.corner_embed(x)
        worst = max(
            worst,
            abs(
                algebra.schatten_p_norm(a, q)
                - 2 ** (-1.0 / q) * algebra.schatten_p_norm(x, q)
            ),
        )
        worst = max(worst, float(np.linalg.norm(a @ a, 2)))
    return worst


def _check_even_norm_recovery(cfg: SuiteConfig) -> float:
    rng = np.random.default_rng(cfg.seed + 10)
    worst = 0.0
    for p in (1.0, 3.0):
        for n_ord in (1, 2):
            x = _rand_matrix(rng, 2, 1.0)
            a = corners.corner_embed(x)
            estimate, _ = corners.recover_even_norm_of(a, p, n_ord)
            gram = a.conj().T @ a
            direct = float(
                np.real(
                    algebra.normalized_trace(np.linalg.matrix_power(gram, n_ord))
                )
            )
            worst = max(worst, abs(estimate - direct) / max(abs(direct), 1e-12))
    return worst


def _check_four_term(cfg: SuiteConfig) -> float:
    rng = np.random.default_rng(cfg.seed + 11)
    worst = 0.0
    for p in (1.0, 1.7, 2.0, 3.0):
        for d in (2, 3):
            for _ in range(10):
                a = _rand_matrix(rng, d, 2.0)
                worst = max(worst, -corners.four_term_defect(a, p))
    counter = corners.four_term_defect(np.array([[1.0]]), 0.5)
    worst = max(worst, abs(counter - (2.0**1.5 - 4.0)))
    return worst


def _check_truncation(cfg: SuiteConfig) -> float:
    rng = np.random.default_rng(cfg.seed + 12)
    worst = 0.0
    for _ in range(5):
        x = _rand_matrix(rng, 2, 1.0)
        for r in (1e-2, 5e-3):
            big = corners.truncation_remainder(x, 3.0, 2, r)
            small = corners.truncation_remainder(x, 3.0, 2, r / 2)
            if big <= 1e-13:
                continue
            worst = max(worst, small / big - 0.6)
    return max(worst, 0.0)


def _check_probe_transposition(cfg: SuiteConfig) -> float:
    u = distribution.transpose_map(2)
    rep1 = distribution.complete_isometry_probe(
        u, level=1, p=3.0, trials=50, seed=cfg.seed
    )
    rep2 = distribution.complete_isometry_probe(
        u, level=2, p=3.0, trials=30, seed=cfg.seed
    )
    # level 1 must look isometric, level 2 must produce a witness
    level1_excess = max(0.0, rep1.max_gap - 1e-10)
    level2_deficit = max(0.0, 1e-3 - rep2.max_gap)
    return max(level1_excess, level2_deficit)


def _check_defects_on_conjugation(cfg: SuiteConfig) -> float:
    rng = np.random.default_rng(cfg.seed + 13)
    from .algebra import matrix_unit

    d = 2
    basis = [matrix_unit(d, i, j) for i in range(d) for j in range(d)]
    u_mat = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))[0]
    u = distribution.conjugation_map(basis, u_mat)
    worst = 0.0
    for a_idx in range(len(basis)):
        worst = max(worst, distribution.adjoint_defect(u, a_idx))
        for b_idx in range(len(basis)):
            worst = max(
                worst, distribution.multiplicativity_defect(u, a_idx, b_idx, 3.0)
            )
            worst = max(worst, distribution.jordan_defect(u, a_idx, b_idx))
    return worst


def _check_linearization(cfg: SuiteConfig) -> float:
    rng = np.random.default_rng(cfg.seed + 14)
    h1 = _rand_matrix(rng, 2, 1.0)
    h1 = h1 + h1.conj().T
    h2 = _rand_matrix(rng, 2, 1.0)
    h2 = h2 + h2.conj().T
    u_mat = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
    conj = [u_mat @ h @ u_mat.conj().T for h in (h1, h2)]
    rep = distribution.selfadjoint_linearization_check([h1, h2], conj, maxdeg=3)
    measured = max(rep.max_extraction_error, rep.max_trace_gap)
    bad = distribution.selfadjoint_linearization_check(
        [np.diag([1.0, -1.0])], [np.diag([1.0, 1.0])], maxdeg=1
    )
    if bad.passed:
        measured = max(measured, 1.0)
    return measured


def _check_even_expansion(cfg: SuiteConfig) -> float:
    rng = np.random.default_rng(cfg.seed + 15)
    worst = 0.0
    for m in (1, 2, 3):
        for _ in range(5):
            coeffs = [_rand_matrix(rng, 2)]
            elems = [_rand_matrix(rng, 2)]
            got = evenp.expand_even_norm(coeffs, elems, m)
            want = evenp.direct_even_norm(coeffs, elems, m)
            worst = max(worst, abs(got - want))
    return worst


def _check_even_transfer(cfg: SuiteConfig) -> float:
    rng = np.random.default_rng(cfg.seed + 16)
    x = _rand_matrix(rng, 2, 1.0)
    u_mat = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
    rep = evenp.even_p_transfer_check(
        [x], [u_mat @ x @ u_mat.conj().T], 2, [1, 2, 3], trials=3, seed=cfg.seed
    )
    measured = rep.worst_norm_gap
    from .algebra import matrix_unit

    units = [matrix_unit(2, i, j) for i in range(2) for j in range(2)]
    tunits = [u.T.copy() for u in units]
    try:
        evenp.even_p_transfer_check(units, tunits, 2, [1], trials=1, seed=cfg.seed)
        measured = max(measured, 1.0)  # should have raised
    except evenp.PreconditionFailedError:
        pass
    return measured


CHECKS: tuple[tuple[str, str, str, float, Callable], ...] = (
    ("core.trace_cyclicity", "core-algebra", "normalized-trace-cyclic", 1e-10, _check_trace_cyclicity),
    ("core.profile_norm", "core-algebra", "p-norm-from-singular-profile", 1e-10, _check_profile_norm),
    ("core.singular_inequalities", "core-algebra", "singular-number-suite", 1e-10, _check_singular_inequalities),
    ("core.hermitian_calculus", "core-algebra", "spectral-calculus-composition", 1e-9, _check_hermitian_calculus),
    ("gadgets.cyclic_trace", "gadget-matrices", "cyclic-trace-property", 1e-9, _check_gadget_families),
    ("coeff.closed_forms", "binomial-combinatorics", "moment-coefficient-closed-forms", 1e-12, _check_closed_form_coefficients),
    ("coeff.root_report", "binomial-combinatorics", "coefficient-root-structure", 1e-8, _check_coefficient_roots),
    ("coeff.nonvanishing", "binomial-combinatorics", "coefficient-nonvanishing", 1e-15, _check_nonvanishing),
    ("coeff.identities", "binomial-combinatorics", "binomial-identities", 1e-12, _check_binomial_identities),
    ("recon.deviation_coefficients", "moment-reconstruction", "gram-deviation-word-coefficient", 1e-9, _check_deviation_coefficients),
    ("recon.moment_recovery", "moment-reconstruction", "norm-to-moment-limit", 1e-4, _check_reconstruction),
    ("recon.aliasing_order", "moment-reconstruction", "grid-error-order", 1e-12, _check_aliasing_order),
    ("psi.ode_residual", "corner-norms", "psi-differential-equation", 1e-7, _check_psi_ode),
    ("psi.series_agreement", "corner-norms", "psi-power-series", 1e-10, _check_psi_series),
    ("psi.sign_rule", "corner-norms", "psi-tail-sign-rule", 1e-12, _check_psi_sign_rule),
    ("corners.cycle_polynomials", "corner-norms", "cycle-polynomial-recurrence", 1e-8, _check_cycle_polynomials),
    ("corners.power_sums", "corner-norms", "square-zero-power-sums", 1e-9, _check_power_sum_identity),
    ("corners.four_function", "corner-norms", "four-powers-via-psi", 1e-9, _check_four_function_identity),
    ("corners.embedding_scale", "corner-norms", "corner-embedding-norm-scale", 1e-10, _check_corner_scaling),
    ("corners.even_norm_recovery", "corner-norms", "even-norm-from-p-norms", 1e-3, _check_even_norm_recovery),
    ("corners.four_term", "corner-norms", "four-term-lower-bound", 1e-10, _check_four_term),
    ("corners.truncation", "corner-norms", "expansion-remainder-decay", 1e-12, _check_truncation),
    ("dist.probe_transposition", "star-distribution", "level-probe-witness", 1e-12, _check_probe_transposition),
    ("dist.defects_conjugation", "star-distribution", "defects-vanish-on-morphisms", 1e-8, _check_defects_on_conjugation),
    ("dist.linearization", "star-distribution", "hermitian-linearization", 1e-8, _check_linearization),
    ("evenp.expansion", "even-p-expansion", "even-norm-word-sum", 1e-9, _check_even_expansion),
    ("evenp.transfer", "even-p-expansion", "level-transfer-even-p", 1e-8, _check_even_transfer),
)

MODULE_NAMES = tuple(sorted({module for _, module, _, _, _ in CHECKS}))


def run_suite(config: SuiteConfig) -> ReportDocument:
    selected = config.modules or MODULE_NAMES
    unknown = set(selected) - set(MODULE_NAMES)
    if unknown:
        raise ValueError(f"unknown modules: {sorted(unknown)}")
    records = []
    for name, module, anchor, default_tol, fn in CHECKS:
        if module not in selected:
            continue
        tol = float(config.tolerances.get(name, default_tol))
        start = time.perf_counter()
        measured = float(fn(config))
        elapsed = time.perf_counter() - start
        records.append(
            CheckRecord(
                name=name,
                module=module,
                anchor=anchor,
                measured=measured,
                tolerance=tol,
                passed=bool(measured <= tol),
                runtime=elapsed,
            )
        )
    records.sort(key=lambda r: r.name)
    return ReportDocument(records=tuple(records), config=config)
