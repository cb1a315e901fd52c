"""Even-integer Schatten powers as finite weighted moment sums.

For p = 2m the power ||1 + X||_{2m}^{2m} with X = sum_j a_j (x) x_j is a
finite sum over words: each star pattern e of length k <= 2m contributes

    tr(a_{i_1}^{e_1} ... a_{i_k}^{e_k}) tau(x_{i_1}^{e_1} ... x_{i_k}^{e_k})
        * sum_j (j/k) binom(m, j) binom(alpha(e), k-j)

with alpha the cyclic star-transition count.  Matching these weighted
moments between two families therefore transfers 2m-norm equality from
one matrix level to all of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import (
    StarWord,
    adjoint,
    as_matrix,
    identity,
    operator_norm,
    schatten_pp,
    tensor,
    word_trace,
)
from .combinatorics import alpha_count, star_patterns
from .gadgets import compact_family

ENUMERATION_GUARD = 10**6
MOMENT_MATCH_TOL = 1e-9
NORM_MATCH_TOL = 1e-8


class PreconditionFailedError(ValueError):
    """The weighted moment sets of the two families already disagree."""

    def __init__(self, word: StarWord, gap: float):
        self.word = word
        self.gap = gap
        pretty = " ".join(f"{i}{'*' if s else ''}" for i, s in word)
        super().__init__(
            f"weighted moments differ at word [{pretty}] (gap {gap:.3g})"
        )


def even_norm_weight(m: int, k: int, stars: Sequence[bool]) -> float:
    """sum_j (j/k) binom(m, j) binom(alpha, k-j); the empty word weighs 1."""
    if k == 0:
        return 1.0
    alpha = alpha_count(stars)
    acc = Fraction(0)
    for j in range(1, min(k, m) + 1):
        if not 0 <= k - j <= alpha:
            continue
        acc += Fraction(j, k) * math.comb(m, j) * math.comb(alpha, k - j)
    return float(acc)


@dataclass(frozen=True)
class EvenNormExpansion:
    """The weighted word scheme behind ||1 + sum a_j (x) x_j||_{2m}^{2m}.

    terms lists every star word of length <= 2m over the element indices
    together with its scalar weight; zero-weight words are omitted.
    """

    m: int
    n_elements: int
    terms: tuple[tuple[StarWord, float], ...]


def even_norm_expansion(n_elements: int, m: int) -> EvenNormExpansion:
    if m < 1 or n_elements < 1:
        raise ValueError("m and n_elements must be >= 1")
    if _enumeration_size(n_elements, m) > ENUMERATION_GUARD:
        raise ValueError("enumeration guard exceeded")
    terms: list[tuple[StarWord, float]] = [((), 1.0)]
    for k in range(1, 2 * m + 1):
        for stars in star_patterns(k):
            weight = even_norm_weight(m, k, stars)
            if weight == 0.0:
                continue
            for idx in np.ndindex(*(n_elements,) * k):
                word = tuple((int(i) + 1, stars[t]) for t, i in enumerate(idx))
                terms.append((word, weight))
    return EvenNormExpansion(m=m, n_elements=n_elements, terms=tuple(terms))


def _enumeration_size(n_elements: int, m: int) -> int:
    base = 2 * n_elements
    return sum(base**k for k in range(2 * m + 1))


def expand_even_norm(
    coeffs: Sequence[np.ndarray], elements: Sequence[np.ndarray], m: int
) -> float:
    """Evaluate ||1 + sum_j a_j (x) x_j||_{2m}^{2m} as the weighted word sum.

    The coefficient traces and element traces are computed separately per
    word (depth-first over index tuples, sharing prefix products), which
    is the content of the expansion: the norm depends on the elements only
    through their weighted word traces.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    a_mats = [as_matrix(a) for a in coeffs]
    x_mats = [as_matrix(x) for x in elements]
    if len(a_mats) != len(x_mats) or not a_mats:
        raise ValueError("need equally many coefficients and elements")
    if _enumeration_size(len(x_mats), m) > ENUMERATION_GUARD:
        raise ValueError("enumeration guard exceeded")
    na = a_mats[0].shape[0]
    nx = x_mats[0].shape[0]
    a_letters = [(a, adjoint(a)) for a in a_mats]
    x_letters = [(x, adjoint(x)) for x in x_mats]

    total = 1.0  # empty word
    for k in range(1, 2 * m + 1):
        for stars in star_patterns(k):
            weight = even_norm_weight(m, k, stars)
            if weight == 0.0:
                continue
            acc = 0.0 + 0.0j

            def walk(pos: int, aprod: np.ndarray, xprod: np.ndarray):
                nonlocal acc
                if pos == k:
                    acc += (np.trace(aprod) / na) * (np.trace(xprod) / nx)
                    return
                star = stars[pos]
                for i in range(len(a_mats)):
                    walk(
                        pos + 1,
                        aprod @ a_letters[i][star],
                        xprod @ x_letters[i][star],
                    )

            walk(0, identity(na), identity(nx))
            total += weight * acc.real
    return float(total)


def direct_even_norm(
    coeffs: Sequence[np.ndarray], elements: Sequence[np.ndarray], m: int
) -> float:
    """||1 + sum_j a_j (x) x_j||_{2m}^{2m} computed from singular values."""
    x = sum(tensor(a, e) for a, e in zip(coeffs, elements))
    dim = x.shape[0]
    return schatten_pp(np.eye(dim) + x, 2 * m)


def even_power_trace(mat: np.ndarray, m: int) -> float:
    """tr_d((M* M)^m) via matrix powers (no eigendecomposition)."""
    gram = adjoint(mat) @ mat
    power = gram
    for _ in range(m - 1):
        power = power @ gram
    return float(np.real(np.trace(power) / mat.shape[0]))


def alternating_moment(
    elements: Sequence[np.ndarray], indices: Sequence[int], m: int
) -> complex:
    """tau(x_{i_1}^* x_{i_2} x_{i_3}^* ... x_{i_{2m}}) recovered from 2m-norms.

    Assembles X(z) = sum_j conj(z_{2j-1}) a_{2j-1}^* (x) x_{i_{2j-1}}
    + z_{2j} a_{2j} (x) x_{i_{2j}} over the size-m compact cyclic-trace
    family and reads the z_1...z_{2m} coefficient of ||X(z)||_{2m}^{2m}
    off a roots-of-unity grid.  Each of the m even rotations of the index
    cycle contributes the same trace, so the raw coefficient is divided
    by m.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if len(indices) != 2 * m:
        raise ValueError("need exactly 2m indices")
    mats = [as_matrix(x) for x in elements]
    for i in indices:
        if not 1 <= i <= len(mats):
            raise IndexError(f"element index {i} out of range")
    fam = compact_family(2 * m)
    terms = []
    conj_flags = []
    for j in range(2 * m):
        xj = mats[indices[j] - 1]
        if j % 2 == 0:  # odd slot (1-based): conjugated variable, adjoint coeff
            terms.append(tensor(adjoint(fam.matrices[j]), xj))
            conj_flags.append(True)
        else:
            terms.append(tensor(fam.matrices[j], xj))
            conj_flags.append(False)
    terms = np.stack(terms)
    n = 2 * m
    q = 4 * m + 3
    scale = max(max(operator_norm(t) for t in terms), 1e-12)
    r = 0.5 / (n * scale)
    digits = np.indices((q,) * n).reshape(n, -1)
    omega = np.exp(2j * np.pi / q)
    zpow = omega**digits
    weights = np.where(
        np.array(conj_flags)[:, None], np.conj(r * zpow), r * zpow
    )
    xz = np.einsum("jg,jab->gab", weights, terms, optimize=True)
    gram = np.matmul(xz.conj().transpose(0, 2, 1), xz)
    power = gram
    for _ in range(m - 1):
        power = np.matmul(power, gram)
    d = terms.shape[1]
    vals = np.trace(power, axis1=1, axis2=2).real / d
    phase = omega ** (-np.sum(digits, axis=0))
    coeff = complex(np.mean(vals * phase) / r**n)
    return coeff / m


@dataclass(frozen=True)
class TransferReport:
    m: int
    levels: tuple[int, ...]
    trials: int
    seed: int
    moment_gap: float
    worst_norm_gap: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "levels": list(self.levels),
            "trials": self.trials,
            "seed": self.seed,
            "moment_gap": self.moment_gap,
            "worst_norm_gap": self.worst_norm_gap,
            "pass": self.passed,
        }


def even_p_transfer_check(
    x_fam: Sequence[np.ndarray],
    y_fam: Sequence[np.ndarray],
    m: int,
    levels: Sequence[int],
    trials: int,
    seed: int,
    moment_tol: float = MOMENT_MATCH_TOL,
    norm_tol: float = NORM_MATCH_TOL,
) -> TransferReport:
    """Weighted-moment matching transfers 2m-norm equality to all levels.

    First verifies that every word of length <= 2m with a nonzero weight
    has equal traces in both families (this is what level-m data pins
    down); on failure raises PreconditionFailedError naming the word.
    Then samples seeded coefficient matrices at each requested level and
    compares ||1 + sum a_j (x) x_j||_{2m} against the y-family value.
    """
    xs = [as_matrix(x) for x in x_fam]
    ys = [as_matrix(y) for y in y_fam]
    if len(xs) != len(ys) or not xs:
        raise ValueError("families must be nonempty and equally sized")
    if _enumeration_size(len(xs), m) > ENUMERATION_GUARD:
        raise ValueError("enumeration guard exceeded")
    moment_gap = 0.0
    for k in range(1, 2 * m + 1):
        for stars in star_patterns(k):
            weight = even_norm_weight(m, k, stars)
            if weight == 0.0:
                continue
            for idx in np.ndindex(*(len(xs),) * k):
                word = tuple((int(i) + 1, stars[t]) for t, i in enumerate(idx))
                gap = abs(
                    weight * (word_trace(xs, word) - word_trace(ys, word))
                )
                moment_gap = max(moment_gap, gap)
                if gap > moment_tol:
                    raise PreconditionFailedError(word, gap)
    seeds = np.random.SeedSequence(seed).spawn(max(len(levels), 1) * trials)
    worst_norm_gap = 0.0
    s = 0
    for level in levels:
        for _ in range(trials):
            rng = np.random.default_rng(seeds[s])
            s += 1
            coeffs = []
            for _ in range(len(xs)):
                g = rng.normal(size=(level, level)) + 1j * rng.normal(
                    size=(level, level)
                )
                nrm = operator_norm(g)
                coeffs.append(g / max(nrm, 1.0))
            nx = direct_even_norm(coeffs, xs, m) ** (1.0 / (2 * m))
            ny = direct_even_norm(coeffs, ys, m) ** (1.0 / (2 * m))
            worst_norm_gap = max(worst_norm_gap, abs(nx - ny))
    return TransferReport(
        m=m,
        levels=tuple(int(v) for v in levels),
        trials=trials,
        seed=seed,
        moment_gap=moment_gap,
        worst_norm_gap=worst_norm_gap,
        passed=worst_norm_gap <= norm_tol,
    )


def alternating_norms_match(
    x_fam: Sequence[np.ndarray],
    y_fam: Sequence[np.ndarray],
    m: int,
    levels: Sequence[int],
    trials: int,
    seed: int,
    moment_tol: float = MOMENT_MATCH_TOL,
) -> TransferReport:
    """Identityless variant: matching alternating moments (recovered via
    the size-m compact family) force equal level-n 2m-norms of
    sum_j a_j (x) x_j with no identity summand."""
    xs = [as_matrix(x) for x in x_fam]
    ys = [as_matrix(y) for y in y_fam]
    if len(xs) != len(ys) or not xs:
        raise ValueError("families must be nonempty and equally sized")
    moment_gap = 0.0
    for idx in np.ndindex(*(len(xs),) * (2 * m)):
        indices = tuple(int(i) + 1 for i in idx)
        mx = alternating_moment(xs, indices, m)
        my = alternating_moment(ys, indices, m)
        gap = abs(mx - my)
        moment_gap = max(moment_gap, gap)
        if gap > moment_tol:
            word = tuple((i, t % 2 == 0) for t, i in enumerate(indices))
            raise PreconditionFailedError(word, gap)
    seeds = np.random.SeedSequence(seed).spawn(max(len(levels), 1) * trials)
    worst = 0.0
    s = 0
    for level in levels:
        for _ in range(trials):
            rng = np.random.default_rng(seeds[s])
            s += 1
            coeffs = []
            for _ in range(len(xs)):
                g = rng.normal(size=(level, level)) + 1j * rng.normal(
                    size=(level, level)
                )
                coeffs.append(g / max(operator_norm(g), 1.0))
            xmat = sum(tensor(a, x) for a, x in zip(coeffs, xs))
            ymat = sum(tensor(a, y) for a, y in zip(coeffs, ys))
            nx = even_power_trace(xmat, m) ** (1.0 / (2 * m))
            ny = even_power_trace(ymat, m) ** (1.0 / (2 * m))
            worst = max(worst, abs(nx - ny))
    return TransferReport(
        m=m,
        levels=tuple(int(v) for v in levels),
        trials=trials,
        seed=seed,
        moment_gap=moment_gap,
        worst_norm_gap=worst,
        passed=worst <= NORM_MATCH_TOL,
    )
