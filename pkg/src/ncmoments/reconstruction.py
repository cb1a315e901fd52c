"""Recovery of word traces from Schatten p-norms of identity perturbations.

Given a cyclic-trace coefficient family a_1..a_n, elements x_1..x_N and a
star word of length n, the matrix

    S_z = I + sum_j z_j a_j^{e_j} (x) x_{i_j}          (z in C^n)

has the property that the coefficient of prod_j z_j^{e_j} in ||S_z||_p^p
equals C(p, n, alpha) times the word trace, with C the moment coefficient
of the star pattern.  The coefficient is extracted by averaging over a
roots-of-unity grid at radius r and extrapolating r -> 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .algebra import (
    StarWord,
    adjoint,
    as_matrix,
    check_word,
    operator_norm,
    tensor,
    word_trace,
)
from .combinatorics import alpha_count, moment_coefficient
from .gadgets import GadgetFamily

BRICK_GUARD = 20
ZERO_COEFF_TOL = 1e-12


class ZeroCoefficientError(ValueError):
    """The moment coefficient vanishes; the word is not recoverable at this p."""


class NonConvergenceError(RuntimeError):
    """The extrapolation residual exceeded the requested tolerance."""


def _prepare(gadget: GadgetFamily, elements: Sequence[np.ndarray], word) -> tuple:
    mats = [as_matrix(x) for x in elements]
    if not mats:
        raise ValueError("need at least one element")
    d = mats[0].shape[0]
    if any(m.shape[0] != d for m in mats):
        raise ValueError("elements must share one dimension")
    letters = check_word(word, len(mats))
    if len(letters) != gadget.n:
        raise ValueError(
            f"word length {len(letters)} must match gadget size {gadget.n}"
        )
    return mats, letters


def slot_word(pattern: Sequence[bool]) -> StarWord:
    """The word ((1, s1), (2, s2), ...) with one slot per pattern entry."""
    return tuple((j + 1, bool(s)) for j, s in enumerate(pattern))


def gram_deviation_coefficient(
    gadget: GadgetFamily,
    elements: Sequence[np.ndarray],
    word,
    k: int,
) -> np.ndarray:
    """Exact coefficient of prod_j z_j^{e_j} in (S_z* S_z - I)^k.

    S_z* S_z - I splits into bricks that each consume one or two of the
    grid variables: a_j (x) x^{e_j} for single slots, and a_s a_t (x)
    x_s^* x_t for pairs with e_s = * and e_t = 1.  The coefficient is the
    sum over ordered brick sequences of length k whose slots partition
    {1..n}; its normalized trace equals tau(word) * k * binom(alpha, n-k)
    when the gadget has the cyclic-trace property.
    """
    mats, letters = _prepare(gadget, elements, word)
    n = gadget.n
    if k < 0:
        raise ValueError("k must be >= 0")
    if n * k > BRICK_GUARD:
        raise ValueError(f"refusing n*k = {n*k} > {BRICK_GUARD}")
    d = mats[0].shape[0]
    dim = gadget.dim * d

    # brick -> (slots consumed, matrix in the tensor algebra)
    bricks: list[tuple[frozenset[int], np.ndarray]] = []
    for j, (idx, star) in enumerate(letters):
        elem = adjoint(mats[idx - 1]) if star else mats[idx - 1]
        bricks.append((frozenset([j]), tensor(gadget.matrices[j], elem)))
    for s, (idx_s, star_s) in enumerate(letters):
        if not star_s:
            continue
        for t, (idx_t, star_t) in enumerate(letters):
            if star_t or s == t:
                continue
            coeff = gadget.matrices[s] @ gadget.matrices[t]
            elem = adjoint(mats[idx_s - 1]) @ mats[idx_t - 1]
            bricks.append((frozenset([s, t]), tensor(coeff, elem)))

    total = np.zeros((dim, dim), dtype=np.complex128)
    if k == 0:
        return total

    def extend(used: frozenset[int], acc: np.ndarray, depth: int):
        nonlocal total
        if depth == k:
            if len(used) == n:
                total = total + acc
            return
        remaining_slots = n - len(used)
        remaining_bricks = k - depth
        if remaining_slots < remaining_bricks or remaining_slots > 2 * remaining_bricks:
            return
        for slots, mat in bricks:
            if slots & used:
                continue
            extend(used | slots, acc @ mat, depth + 1)

    extend(frozenset(), np.eye(dim, dtype=np.complex128), 0)
    return total


@dataclass(frozen=True)
class ExtrapolationPlan:
    """Radius ladder and grid order for the r -> 0 limit.

    ``error_powers`` lists the exponents of the residual expansion the
    Richardson stage eliminates, in order; ``richardson_order`` caps how
    many are actually removed.
    """

    radii: tuple[float, ...]
    q: int
    richardson_order: int = 2

    def __post_init__(self):
        if self.q < 3:
            raise ValueError("q must be >= 3")
        if len(self.radii) < 1:
            raise ValueError("need at least one radius")
        if any(r <= 0 for r in self.radii):
            raise ValueError("radii must be positive")
        if any(b >= a for a, b in zip(self.radii, self.radii[1:])):
            raise ValueError("radii must be strictly decreasing")
        if self.richardson_order < 0:
            raise ValueError("richardson_order must be >= 0")

    def error_powers(self, n: int) -> tuple[int, ...]:
        count = max(self.richardson_order, 1) + 2
        if self.q >= 2 * n + 3:
            return tuple(2 * (i + 1) for i in range(count))
        return tuple(i + 1 for i in range(count))


class NormOracle:
    """Callable contract z in C^n -> ||S_z||_p^p.

    Evaluations are pure and deterministic; distinct grid points are
    independent, so batch sweeps may be fused by the kernel backend.
    """

    def __init__(
        self,
        gadget: GadgetFamily,
        elements: Sequence[np.ndarray],
        word,
        p: float,
    ):
        if not np.isfinite(p) or p <= 0:
            raise ValueError(f"p must be finite and positive, got {p}")
        mats, letters = _prepare(gadget, elements, word)
        self.p = float(p)
        self.n = gadget.n
        self.gadget_dim = gadget.dim
        self.element_dim = mats[0].shape[0]
        self.word: StarWord = letters
        terms = []
        for j, (idx, star) in enumerate(letters):
            coeff = adjoint(gadget.matrices[j]) if star else gadget.matrices[j]
            terms.append(tensor(coeff, mats[idx - 1]))
        self._terms = np.ascontiguousarray(np.stack(terms))
        self._stars = np.array([1 if s else 0 for _, s in letters], dtype=np.int8)
        self._coeff_norms = [operator_norm(a) for a in gadget.matrices]
        self._elem_norms = [operator_norm(mats[idx - 1]) for idx, _ in letters]

    def evaluate(self, z: Sequence[complex]) -> float:
        zv = np.asarray(z, dtype=np.complex128)
        if zv.shape != (self.n,):
            raise ValueError(f"expected {self.n} coordinates, got shape {zv.shape}")
        dim = self.gadget_dim * self.element_dim
        smat = np.eye(dim, dtype=np.complex128) + np.einsum(
            "j,jab->ab", zv, self._terms
        )
        s = np.linalg.svd(smat, compute_uv=False)
        return float(np.mean(s**self.p))

    def admissible_radius(self) -> float:
        """Largest safe grid radius for the power-series expansion.

        The series for |S_z|^p converges when r * (n^2 + 2n) * K < 1 with
        K = max_j max(|a_j| |x_j|, |a_j|^2 |x_j|^2); tightened by 1/2.
        """
        n = self.n
        K = max(
            max(ca * cx, (ca * cx) ** 2)
            for ca, cx in zip(self._coeff_norms, self._elem_norms)
        )
        K = max(K, 1e-12)
        return 1.0 / (2.0 * (n**2 + 2 * n) * K)

    def grid_phase_mean(self, r: float, q: int) -> complex:
        return complex(
            kernels.grid_phase_mean(self._terms, self._stars, self.p, float(r), int(q))
        )


def make_norm_oracle(
    gadget: GadgetFamily, elements: Sequence[np.ndarray], word, p: float
) -> NormOracle:
    return NormOracle(gadget, elements, word, p)


def default_plan(oracle: NormOracle, q: int | None = None) -> ExtrapolationPlan:
    """Three radii starting at half the admissible bound, halving.

    Starting lower amplifies rounding noise through the 1/r^n division
    faster than it shrinks the model error, so the ladder stays coarse.
    """
    r0 = oracle.admissible_radius() / 2.0
    radii = tuple(r0 / 2**i for i in range(3))
    return ExtrapolationPlan(radii=radii, q=q or 2 * oracle.n + 3)


def fourier_moment_estimate(
    oracle: NormOracle, word, r: float, q: int
) -> complex:
    """Grid estimate of C(p, n, alpha) * tau(word) at radius r.

    Averages oracle values against the conjugate phase of the target
    monomial over the full q^n roots-of-unity grid and divides by r^n.
    """
    letters = tuple((int(i), bool(s)) for i, s in word)
    if letters != tuple(oracle.word):
        raise ValueError("word does not match the oracle's word")
    if q < 3:
        raise ValueError("q must be >= 3")
    bound = oracle.admissible_radius()
    if r <= 0 or r > bound * (1 + 1e-9):
        raise ValueError(f"radius {r} outside admissible interval (0, {bound:g}]")
    if hasattr(oracle, "grid_phase_mean"):
        mean = oracle.grid_phase_mean(r, q)
    else:
        mean = _grid_phase_mean_generic(oracle, letters, r, q)
    if not np.isfinite(mean.real) or not np.isfinite(mean.imag):
        raise NonConvergenceError("oracle returned a non-finite value on the grid")
    return mean / r**oracle.n


def _grid_phase_mean_generic(oracle, letters: StarWord, r: float, q: int) -> complex:
    """Grid sweep through single evaluate() calls, for oracles that only
    honor the callable contract."""
    n = len(letters)
    omega = np.exp(2j * np.pi / q)
    acc = 0.0 + 0.0j
    for digits in itertools.product(range(q), repeat=n):
        z = [r * omega**m for m in digits]
        exponent = sum(m if star else -m for m, (_, star) in zip(digits, letters))
        acc += oracle.evaluate(z) * omega**exponent
    return acc / q**n


def richardson_table(values: Sequence[complex], powers: Sequence[int]) -> list[list[complex]]:
    """Iterated Richardson elimination for radii halved at each step.

    values[i] is the estimate at radius r0 / 2^i; powers lists the error
    exponents to eliminate in order.  Returns the full triangular table.
    """
    table = [list(values)]
    for power in powers:
        prev = table[-1]
        if len(prev) < 2:
            break
        factor = 2.0**power
        nxt = [
            (factor * prev[i + 1] - prev[i]) / (factor - 1.0)
            for i in range(len(prev) - 1)
        ]
        table.append(nxt)
    return table


@dataclass(frozen=True)
class MomentEstimate:
    value: complex
    residual: float
    coefficient: float
    raw_estimates: tuple[complex, ...]

    def to_dict(self) -> dict:
        return {
            "estimate_re": self.value.real,
            "estimate_im": self.value.imag,
            "residual": self.residual,
            "coefficient": self.coefficient,
        }


def extrapolated_moment(
    oracle: NormOracle,
    word,
    p: float,
    plan: ExtrapolationPlan | None = None,
    residual_tol: float | None = 1e-2,
) -> MomentEstimate:
    """Estimate tau(word) from the oracle via Richardson extrapolation.

    Divides the extrapolated grid limit by the moment coefficient; raises
    ZeroCoefficientError when that coefficient vanishes (even p in the
    excluded regime) and NonConvergenceError when the extrapolation
    residual exceeds ``residual_tol``.
    """
    if abs(p - oracle.p) > 0:
        raise ValueError("p does not match the oracle")
    n = oracle.n
    alpha = alpha_count([s for _, s in oracle.word])
    coeff = moment_coefficient(p, n, alpha)
    if abs(coeff) <= ZERO_COEFF_TOL:
        raise ZeroCoefficientError(
            f"moment coefficient vanishes for p={p}, N={n}, alpha={alpha}"
        )
    if plan is None:
        plan = default_plan(oracle)
    estimates = [
        fourier_moment_estimate(oracle, word, r, plan.q) for r in plan.radii
    ]
    if len(estimates) == 1:
        value = estimates[0]
        residual = float("nan")
    else:
        powers = plan.error_powers(n)[: plan.richardson_order]
        table = richardson_table(estimates, powers)
        final = table[-1]
        value = final[-1]
        residual = abs(final[-1] - final[-2]) if len(final) >= 2 else abs(
            table[-2][-1] - table[-2][-2]
        )
    moment = value / coeff
    if residual_tol is not None and np.isfinite(residual):
        if residual / abs(coeff) > residual_tol:
            raise NonConvergenceError(
                f"extrapolation residual {residual/abs(coeff):g} above {residual_tol:g}"
            )
    return MomentEstimate(
        value=complex(moment),
        residual=float(residual / abs(coeff)) if np.isfinite(residual) else residual,
        coefficient=float(coeff),
        raw_estimates=tuple(estimates),
    )


def recover_moment(
    gadget: GadgetFamily,
    elements: Sequence[np.ndarray],
    word,
    p: float,
    plan: ExtrapolationPlan | None = None,
    q: int | None = None,
    residual_tol: float | None = 1e-2,
) -> MomentEstimate:
    """End-to-end recovery with rescaling: elements are normalized to
    operator norm <= 1 before the oracle is built and the recovered moment
    is scaled back, so one admissibility bound covers all instances.
    """
    mats = [as_matrix(x) for x in elements]
    letters = check_word(word, len(mats))
    scales = [max(operator_norm(m), 1e-30) for m in mats]
    scaled = [m / s for m, s in zip(mats, scales)]
    unscale = 1.0
    for idx, _ in letters:
        unscale *= scales[idx - 1]
    oracle = make_norm_oracle(gadget, scaled, letters, p)
    if plan is None:
        plan = default_plan(oracle, q=q)
    est = extrapolated_moment(oracle, letters, p, plan, residual_tol=residual_tol)
    return MomentEstimate(
        value=est.value * unscale,
        residual=est.residual * unscale,
        coefficient=est.coefficient,
        raw_estimates=est.raw_estimates,
    )


def reconstruction_error(
    gadget: GadgetFamily,
    elements: Sequence[np.ndarray],
    word,
    p: float,
    **kwargs,
) -> tuple[complex, complex, float]:
    """(estimate, direct trace, absolute error) for one word."""
    est = recover_moment(gadget, elements, word, p, **kwargs)
    direct = word_trace(elements, word)
    return est.value, direct, abs(est.value - direct)
