"""Word-moment tables, distribution matching, and probes for linear maps
given on a spanning set of matrices.

A map u given by images of a basis extends coefficientwise to matrix
levels: X = sum_s c_s (x) b_s goes to sum_s c_s (x) u(b_s).  Equality of
p-norms of 1 + X across all levels forces equality of all word moments
when p is not an even integer; the probe searches for violations, the
moment tables make the conclusion checkable, and the defect functionals
quantify how far a map is from multiplicative / adjoint-preserving.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import (
    StarWord,
    adjoint,
    as_matrix,
    hs_inner,
    identity,
    operator_norm,
    schatten_p_norm,
    tensor,
    word_trace,
)
from .gadgets import compact_family
from .reconstruction import recover_moment

SPAN_RESIDUAL_TOL = 1e-8
GRAM_CONDITION_CAP = 1e8
WORD_COUNT_GUARD = 10**6


class ProductOutsideSpanError(ValueError):
    """The requested product is not representable in the map's span."""


class AdjointOutsideSpanError(ValueError):
    """The requested adjoint is not representable in the map's span."""


class SpanMap:
    """A linear map specified on a finite spanning set of matrices.

    basis and images must have equal length; basis members must be
    linearly independent (Hilbert-Schmidt Gram condition number below
    1e8).  A unital map must represent the identity in its span and map
    it to the identity.
    """

    def __init__(
        self,
        basis: Sequence[np.ndarray],
        images: Sequence[np.ndarray],
        unital: bool = False,
    ):
        if len(basis) != len(images) or not basis:
            raise ValueError("basis and images must be nonempty, equal-length lists")
        self.basis = tuple(as_matrix(b) for b in basis)
        self.images = tuple(as_matrix(m) for m in images)
        d = self.basis[0].shape[0]
        if any(b.shape[0] != d for b in self.basis):
            raise ValueError("basis members must share one dimension")
        d2 = self.images[0].shape[0]
        if any(m.shape[0] != d2 for m in self.images):
            raise ValueError("images must share one dimension")
        self.unital = bool(unital)
        k = len(self.basis)
        gram = np.empty((k, k), dtype=np.complex128)
        for i in range(k):
            for j in range(k):
                gram[i, j] = hs_inner(self.basis[i], self.basis[j])
        cond = np.linalg.cond(gram)
        if not np.isfinite(cond) or cond >= GRAM_CONDITION_CAP:
            raise ValueError(
                f"basis is numerically dependent (Gram condition {cond:.3g})"
            )
        self._gram = gram
        if self.unital:
            coeffs, residual = self.expand(identity(d))
            if residual > SPAN_RESIDUAL_TOL:
                raise ValueError("unital map but identity is not in the span")
            img = self.combine(coeffs)
            if operator_norm(img - identity(d2)) > 1e-8:
                raise ValueError("unital map must send the identity to the identity")

    @property
    def domain_dim(self) -> int:
        return self.basis[0].shape[0]

    @property
    def image_dim(self) -> int:
        return self.images[0].shape[0]

    def expand(self, m) -> tuple[np.ndarray, float]:
        """Least-squares coefficients of m over the basis and the
        Hilbert-Schmidt residual of the fit."""
        arr = as_matrix(m)
        rhs = np.array([hs_inner(b, arr) for b in self.basis])
        coeffs = np.linalg.solve(self._gram, rhs)
        fit = sum(c * b for c, b in zip(coeffs, self.basis))
        residual = float(np.sqrt(abs(hs_inner(arr - fit, arr - fit))))
        return coeffs, residual

    def combine(self, coeffs: Sequence[complex]) -> np.ndarray:
        return sum(c * m for c, m in zip(coeffs, self.images))

    def apply(self, m, tol: float = SPAN_RESIDUAL_TOL) -> np.ndarray:
        coeffs, residual = self.expand(m)
        if residual > tol:
            raise ProductOutsideSpanError(
                f"element outside span (residual {residual:.3g})"
            )
        return self.combine(coeffs)


def identity_span_map(basis: Sequence[np.ndarray], unital: bool = False) -> SpanMap:
    return SpanMap(basis, basis, unital=unital)


def matrix_algebra_span_map(images_of_units, unital: bool = True) -> SpanMap:
    """SpanMap on the full matrix-unit basis of M_d from images of e_ij."""
    from .algebra import matrix_unit

    k = len(images_of_units)
    d = int(round(np.sqrt(k)))
    if d * d != k:
        raise ValueError("need d^2 images for the matrix-unit basis of M_d")
    basis = [matrix_unit(d, i, j) for i in range(d) for j in range(d)]
    return SpanMap(basis, images_of_units, unital=unital)


def transpose_map(d: int) -> SpanMap:
    """The transposition map on M_d over the matrix-unit basis."""
    from .algebra import matrix_unit

    images = [matrix_unit(d, j, i) for i in range(d) for j in range(d)]
    return matrix_algebra_span_map(images, unital=True)


def conjugation_map(basis: Sequence[np.ndarray], unitary: np.ndarray) -> SpanMap:
    """x -> U x U* on the given basis."""
    u = as_matrix(unitary)
    images = [u @ as_matrix(b) @ adjoint(u) for b in basis]
    return SpanMap(basis, images, unital=False)


# ---------------------------------------------------------------------------
# moment tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MomentTable:
    """Word traces of a family for every star word up to maxdeg.

    Words are stored as typed, not cyclically reduced: trace cyclicity is
    something the tables let you test, not an assumption baked into them.
    """

    maxdeg: int
    family_size: int
    entries: dict[StarWord, complex]

    def gap_to(self, other: "MomentTable") -> tuple[float, StarWord]:
        if (self.maxdeg, self.family_size) != (other.maxdeg, other.family_size):
            raise ValueError("tables have different shapes")
        if self.entries.keys() != other.entries.keys():
            raise ValueError("tables index different word sets")
        worst, worst_word = -1.0, ()
        for word, value in self.entries.items():
            gap = abs(value - other.entries[word])
            if gap > worst:
                worst, worst_word = gap, word
        return worst, worst_word


def _all_words(family_size: int, maxdeg: int):
    yield ()
    frontier: list[StarWord] = [()]
    letters = [
        (idx, star) for idx in range(1, family_size + 1) for star in (False, True)
    ]
    for _ in range(maxdeg):
        nxt = []
        for word in frontier:
            for letter in letters:
                new = word + (letter,)
                yield new
                nxt.append(new)
        frontier = nxt


def word_count(family_size: int, maxdeg: int) -> int:
    base = 2 * family_size
    return sum(base**k for k in range(maxdeg + 1))


def star_moments(family: Sequence[np.ndarray], maxdeg: int) -> MomentTable:
    """Direct word-trace table of the family up to degree maxdeg."""
    mats = [as_matrix(m) for m in family]
    if maxdeg < 0:
        raise ValueError("maxdeg must be >= 0")
    if word_count(len(mats), maxdeg) > WORD_COUNT_GUARD:
        raise ValueError("word count guard exceeded")
    entries: dict[StarWord, complex] = {(): 1.0 + 0.0j}
    if not mats:
        return MomentTable(maxdeg=maxdeg, family_size=0, entries=entries)
    d = mats[0].shape[0]
    if any(m.shape[0] != d for m in mats):
        raise ValueError("family members must share one dimension")
    letters = {
        (idx, star): (adjoint(mats[idx - 1]) if star else mats[idx - 1])
        for idx in range(1, len(mats) + 1)
        for star in (False, True)
    }
    products: dict[StarWord, np.ndarray] = {(): identity(d)}
    frontier = [()]
    for _ in range(maxdeg):
        nxt = []
        for word in frontier:
            base = products[word]
            for letter, mat in letters.items():
                new = word + (letter,)
                prod = base @ mat
                products[new] = prod
                entries[new] = complex(np.trace(prod) / d)
                nxt.append(new)
        frontier = nxt
    return MomentTable(maxdeg=maxdeg, family_size=len(mats), entries=entries)


def reconstruct_moment_table(
    family: Sequence[np.ndarray],
    maxdeg: int,
    p: float,
    q: int = 3,
    residual_tol: float | None = None,
) -> MomentTable:
    """Moment table recovered purely through p-norm evaluations.

    Every word of length k is recovered from its own norm oracle built on
    the compact cyclic-trace family of size ceil(k/2); q = 3 keeps the
    grids small (the default Richardson ladder absorbs the first-order
    error of the coarse grid).
    """
    mats = [as_matrix(m) for m in family]
    if word_count(len(mats), maxdeg) > WORD_COUNT_GUARD:
        raise ValueError("word count guard exceeded")
    entries: dict[StarWord, complex] = {(): 1.0 + 0.0j}
    gadgets = {k: compact_family(k) for k in range(1, maxdeg + 1)}
    for word in _all_words(len(mats), maxdeg):
        if not word:
            continue
        est = recover_moment(
            gadgets[len(word)], mats, word, p, q=q, residual_tol=residual_tol
        )
        entries[word] = est.value
    return MomentTable(maxdeg=maxdeg, family_size=len(mats), entries=entries)


@dataclass(frozen=True)
class MatchReport:
    passed: bool
    tolerance: float
    worst_gap: float
    worst_word: StarWord

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "tolerance": self.tolerance,
            "worst_gap": self.worst_gap,
            "worst_word": [[i, "*" if s else "1"] for i, s in self.worst_word],
        }


def distributions_match(a: MomentTable, b: MomentTable, tol: float) -> MatchReport:
    worst, worst_word = a.gap_to(b)
    return MatchReport(
        passed=bool(worst <= tol), tolerance=tol, worst_gap=worst, worst_word=worst_word
    )


# ---------------------------------------------------------------------------
# complete-isometry probe
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProbeReport:
    level: int
    p: float
    trials: int
    seed: int
    max_gap: float
    max_gap_before_ascent: float
    worst_trial: int
    witness: np.ndarray  # coefficient stack of the worst perturbation

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "p": self.p,
            "trials": self.trials,
            "seed": self.seed,
            "max_gap": self.max_gap,
            "max_gap_before_ascent": self.max_gap_before_ascent,
            "worst_trial": self.worst_trial,
            "witness": [
                [[z.real, z.imag] for z in row.reshape(-1)] for row in self.witness
            ],
        }


def _level_norm_gap(u: SpanMap, coeffs: np.ndarray, p: float) -> float:
    level = coeffs.shape[1]
    x = sum(tensor(coeffs[s], u.basis[s]) for s in range(len(u.basis)))
    y = sum(tensor(coeffs[s], u.images[s]) for s in range(len(u.basis)))
    gap = schatten_p_norm(np.eye(level * u.domain_dim) + x, p) - schatten_p_norm(
        np.eye(level * u.image_dim) + y, p
    )
    return abs(float(gap))


def _clip_coeff_norms(coeffs: np.ndarray) -> np.ndarray:
    out = coeffs.copy()
    for s in range(out.shape[0]):
        nrm = operator_norm(out[s])
        if nrm > 1.0:
            out[s] /= nrm
    return out


def complete_isometry_probe(
    u: SpanMap,
    level: int,
    p: float,
    trials: int,
    seed: int,
    ascent_steps: int = 50,
) -> ProbeReport:
    """Randomized falsifier for level-``level`` isometry of 1 + X.

    Samples X with seeded coefficient matrices of operator norm <= 1,
    records the worst p-norm gap, then runs a coordinate ascent from the
    worst sample to strengthen the witness.  A probe can only ever refute
    the isometry property; a small max_gap over many trials is evidence,
    not proof.
    """
    if level < 1 or trials < 1:
        raise ValueError("level and trials must be >= 1")
    k = len(u.basis)
    seeds = np.random.SeedSequence(seed).spawn(trials)
    worst_gap, worst_trial, worst_coeffs = -1.0, -1, None
    for t in range(trials):
        rng = np.random.default_rng(seeds[t])
        raw = rng.normal(size=(k, level, level)) + 1j * rng.normal(
            size=(k, level, level)
        )
        coeffs = _clip_coeff_norms(raw / np.sqrt(2 * level))
        gap = _level_norm_gap(u, coeffs, p)
        if gap > worst_gap:
            worst_gap, worst_trial, worst_coeffs = gap, t, coeffs
    before = worst_gap
    coeffs = worst_coeffs
    gap = worst_gap
    step = 0.1
    moves = 0
    improved_in_pass = False
    flat = [(s, i, j, part) for s in range(k) for i in range(level)
            for j in range(level) for part in (1.0, 1.0j)]
    cursor = 0
    while moves < ascent_steps:
        s, i, j, part = flat[cursor]
        cursor = (cursor + 1) % len(flat)
        improved = False
        for sign in (1.0, -1.0):
            cand = coeffs.copy()
            cand[s, i, j] += sign * step * part
            cand = _clip_coeff_norms(cand)
            g = _level_norm_gap(u, cand, p)
            if g > gap:
                coeffs, gap = cand, g
                improved = True
                break
        improved_in_pass = improved_in_pass or improved
        moves += 1
        if cursor == 0:
            if not improved_in_pass:
                step /= 2.0
            improved_in_pass = False
    return ProbeReport(
        level=level,
        p=p,
        trials=trials,
        seed=seed,
        max_gap=float(gap),
        max_gap_before_ascent=float(before),
        worst_trial=worst_trial,
        witness=coeffs,
    )


# ---------------------------------------------------------------------------
# defect functionals
# ---------------------------------------------------------------------------

def _image_of(u: SpanMap, idx: int) -> np.ndarray:
    if not 0 <= idx < len(u.basis):
        raise IndexError(f"basis index {idx} out of range")
    return u.images[idx]


def multiplicativity_defect(
    u: SpanMap,
    a_idx: int,
    b_idx: int,
    p: float,
    use_oracle: bool = False,
    q: int | None = None,
) -> float:
    """||u(ab) - u(a)u(b)||_2^2 via its four-trace expansion.

    The four traces are tau(w) for w running over the (star,star,1,1)
    words in {u(b), u(a), u(ab), 1}; with use_oracle they are recovered
    from p-norms through the size-2 compact coefficient family instead of
    read off the images (p must avoid 2 and 4, where the recovery
    coefficient vanishes).
    """
    if not (0 <= a_idx < len(u.basis) and 0 <= b_idx < len(u.basis)):
        raise IndexError("basis index out of range")
    a, b = u.basis[a_idx], u.basis[b_idx]
    prod = a @ b
    coeffs, residual = u.expand(prod)
    if residual > SPAN_RESIDUAL_TOL:
        raise ProductOutsideSpanError(
            f"a*b lies outside the span (residual {residual:.3g})"
        )
    ua = _image_of(u, a_idx)
    ub = _image_of(u, b_idx)
    uab = u.combine(coeffs)
    one = identity(u.image_dim)
    word = ((1, True), (2, True), (3, False), (4, False))
    tuples = (
        (ub, ua, ua, ub),
        (uab, one, uab, one),
        (ub, ua, uab, one),
        (uab, one, ua, ub),
    )
    if use_oracle:
        from .reconstruction import ZeroCoefficientError

        if min(abs(p - 2.0), abs(p - 4.0)) < 1e-12:
            raise ZeroCoefficientError(
                "oracle-mode multiplicativity defect needs p outside {2, 4}"
            )
        gadget = compact_family(4)
        traces = [
            recover_moment(gadget, elems, word, p, q=q).value for elems in tuples
        ]
    else:
        traces = [word_trace(elems, word) for elems in tuples]
    value = (traces[0] + traces[1] - traces[2] - traces[3]).real
    return max(float(value), 0.0)


def adjoint_defect(u: SpanMap, x_idx: int) -> float:
    """||u(x*) - u(x)*||_2 read directly off the images."""
    if not 0 <= x_idx < len(u.basis):
        raise IndexError("basis index out of range")
    x = u.basis[x_idx]
    coeffs, residual = u.expand(adjoint(x))
    if residual > SPAN_RESIDUAL_TOL:
        raise AdjointOutsideSpanError(
            f"x* lies outside the span (residual {residual:.3g})"
        )
    u_xstar = u.combine(coeffs)
    diff = u_xstar - adjoint(_image_of(u, x_idx))
    return float(np.sqrt(abs(hs_inner(diff, diff))))


def jordan_defect(u: SpanMap, a_idx: int, b_idx: int) -> float:
    """||u(ab + ba) - u(a)u(b) - u(b)u(a)||_2 for maps given on a full algebra."""
    a, b = u.basis[a_idx], u.basis[b_idx]
    sym = a @ b + b @ a
    coeffs, residual = u.expand(sym)
    if residual > SPAN_RESIDUAL_TOL:
        raise ProductOutsideSpanError("ab + ba lies outside the span")
    ua, ub = u.images[a_idx], u.images[b_idx]
    diff = u.combine(coeffs) - ua @ ub - ub @ ua
    return float(np.sqrt(abs(hs_inner(diff, diff))))


# ---------------------------------------------------------------------------
# linearization of joint moments for self-adjoint families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearizationReport:
    maxdeg: int
    tolerance: float
    max_extraction_error: float
    max_sum_gap: float
    max_trace_gap: float
    worst_word: tuple[int, ...]
    passed: bool

    def to_dict(self) -> dict:
        return {
            "maxdeg": self.maxdeg,
            "tolerance": self.tolerance,
            "max_extraction_error": self.max_extraction_error,
            "max_sum_gap": self.max_sum_gap,
            "max_trace_gap": self.max_trace_gap,
            "worst_word": list(self.worst_word),
            "pass": self.passed,
        }


def _hermitian_gadget_terms(k: int, elems: Sequence[np.ndarray]):
    """Term stacks for sum_j (z_j e_{j,j+1} + conj(z_j) e_{j+1,j}) (x) x_j."""
    from .algebra import matrix_unit

    plain = []
    conj = []
    for j in range(k):
        up = matrix_unit(k, j, (j + 1) % k)
        down = matrix_unit(k, (j + 1) % k, j)
        plain.append(tensor(up, elems[j]))
        conj.append(tensor(down, elems[j]))
    return np.stack(plain), np.stack(conj)


def _extract_unit_coefficient(plain: np.ndarray, conj: np.ndarray, k: int, r: float, q: int) -> complex:
    """Coefficient of z_1 ... z_k in tr((sum_j a_j(z) (x) x_j)^k).

    The trace of the k-th power is a polynomial of total degree k in the
    z_j and their conjugates, so a q-th roots-of-unity average with
    q >= 2k + 3 recovers the coefficient exactly (up to rounding).
    """
    n = k
    digits = np.indices((q,) * n).reshape(n, -1)
    omega = np.exp(2j * np.pi / q)
    zpow = omega**digits
    weights_plain = r * zpow
    weights_conj = np.conj(weights_plain)
    a = np.einsum("jg,jab->gab", weights_plain, plain, optimize=True)
    a += np.einsum("jg,jab->gab", weights_conj, conj, optimize=True)
    power = a
    for _ in range(k - 1):
        power = np.matmul(power, a)
    d = a.shape[1]
    traces = np.trace(power, axis1=1, axis2=2) / d
    phase = omega ** (-np.sum(digits, axis=0))
    return complex(np.mean(traces * phase) / r**k)


def selfadjoint_linearization_check(
    x_fam: Sequence[np.ndarray],
    y_fam: Sequence[np.ndarray],
    maxdeg: int,
    tol: float = 1e-8,
) -> LinearizationReport:
    """Word traces of self-adjoint families agree iff the distributions of
    their canonical matrix-coefficient lifts agree.

    For each index word (i_1..i_k) with k <= maxdeg the coefficient of
    z_1...z_k in tr((sum_j a_j(z) (x) x_{i_j})^k), with a_j(z) the cyclic
    ladder of matrix units, equals tau(x_{i_1} ... x_{i_k}); the check
    extracts that coefficient on both families, verifies it against the
    direct word trace, and compares the families word by word.
    """
    xs = [as_matrix(m) for m in x_fam]
    ys = [as_matrix(m) for m in y_fam]
    if len(xs) != len(ys) or not xs:
        raise ValueError("families must be nonempty and equally sized")
    from .algebra import is_hermitian

    for m in (*xs, *ys):
        if not is_hermitian(m):
            raise ValueError("linearization check requires Hermitian inputs")
    if maxdeg < 1:
        raise ValueError("maxdeg must be >= 1")
    max_extraction = 0.0
    max_sum_gap = 0.0
    max_trace_gap = 0.0
    worst: tuple[int, ...] = ()
    scale = max(max(operator_norm(m) for m in xs + ys), 1e-6)
    for k in range(1, maxdeg + 1):
        q = 2 * k + 3
        r = 0.5 / (k * scale)
        for word_idx in np.ndindex(*(len(xs),) * k):
            word = tuple(int(i) + 1 for i in word_idx)
            ex = [xs[i] for i in word_idx]
            ey = [ys[i] for i in word_idx]
            cx = _extract_unit_coefficient(*_hermitian_gadget_terms(k, ex), k, r, q)
            cy = _extract_unit_coefficient(*_hermitian_gadget_terms(k, ey), k, r, q)
            tx = word_trace(xs, [(i, False) for i in word])
            ty = word_trace(ys, [(i, False) for i in word])
            max_extraction = max(max_extraction, abs(cx - tx), abs(cy - ty))
            sum_gap = abs(cx - cy)
            trace_gap = abs(tx - ty)
            max_sum_gap = max(max_sum_gap, sum_gap)
            if trace_gap > max_trace_gap:
                max_trace_gap = trace_gap
                worst = word
    # equal sums force equal traces: the trace gap never exceeds the gap
    # between the extracted coefficients plus the extraction error
    forcing_ok = max_trace_gap <= max_sum_gap + 2 * max_extraction + 1e-12
    passed = max_extraction <= tol and max_trace_gap <= tol and forcing_ok
    return LinearizationReport(
        maxdeg=maxdeg,
        tolerance=tol,
        max_extraction_error=max_extraction,
        max_sum_gap=max_sum_gap,
        max_trace_gap=max_trace_gap,
        worst_word=worst,
        passed=passed,
    )
