"""Coefficient families with the cyclic-trace property.

A family a_1..a_n has the cyclic-trace property when the normalized trace
of a_{s(1)} ... a_{s(n)} equals 1 for every circular permutation s (that is
s(j) = j + k mod n for some k) and 0 for every other permutation.  Such a
family isolates a single moment inside a norm expansion.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .algebra import matrix_unit

EXHAUSTIVE_CAP = 9
DEFAULT_TOL = 1e-9
DEFAULT_SAMPLE = 100_000


@dataclass(frozen=True)
class GadgetFamily:
    """Ordered coefficient matrices sharing one dimension."""

    matrices: tuple[np.ndarray, ...]
    kind: str = "custom"

    def __post_init__(self):
        if len(self.matrices) < 1:
            raise ValueError("a gadget family needs at least one matrix")
        mats = tuple(np.asarray(m, dtype=np.complex128) for m in self.matrices)
        dim = mats[0].shape[0]
        for m in mats:
            if m.shape != (dim, dim):
                raise ValueError("gadget matrices must be square with equal dims")
        object.__setattr__(self, "matrices", mats)

    @property
    def n(self) -> int:
        return len(self.matrices)

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0]

    def stacked(self) -> np.ndarray:
        return np.ascontiguousarray(np.stack(self.matrices))


def full_cycle_family(n: int) -> GadgetFamily:
    """n matrices of size n: a_j = n^(1/n) e_{j, j+1 mod n}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    scale = n ** (1.0 / n)
    mats = [scale * matrix_unit(n, j, (j + 1) % n) for j in range(n)]
    return GadgetFamily(tuple(mats), kind="full_cycle")


def compact_family(n: int) -> GadgetFamily:
    """A cyclic-trace family of ceil(n/2) x ceil(n/2) matrices.

    Odd slots carry diagonal units, even slots carry the superdiagonal, and
    the last slot closes the cycle with m * e_{m,1} (integer entries, so the
    property holds exactly).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    m = (n + 1) // 2
    mats: list[np.ndarray] = [None] * n  # type: ignore[list-item]
    if n == 2 * m:
        for j in range(1, m + 1):
            mats[2 * j - 2] = matrix_unit(m, j - 1, j - 1)
        for j in range(1, m):
            mats[2 * j - 1] = matrix_unit(m, j - 1, j)
        mats[2 * m - 1] = m * matrix_unit(m, m - 1, 0)
    else:
        for j in range(1, m):
            mats[2 * j - 2] = matrix_unit(m, j - 1, j - 1)
            mats[2 * j - 1] = matrix_unit(m, j - 1, j)
        mats[2 * m - 2] = m * matrix_unit(m, m - 1, 0)
    return GadgetFamily(tuple(mats), kind="compact")


def is_circular(perm: tuple[int, ...]) -> bool:
    """True when perm (0-based values) is j -> j + k mod n for some shift k."""
    n = len(perm)
    k = perm[0]
    return all(perm[j] == (j + k) % n for j in range(n))


@dataclass(frozen=True)
class CyclicTraceReport:
    n: int
    dim: int
    kind: str
    mode: str
    checked: int
    max_deviation: float
    worst_permutation: tuple[int, ...]
    tolerance: float
    passed: bool
    seed: int | None = field(default=None)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "dim": self.dim,
            "kind": self.kind,
            "mode": self.mode,
            "checked": self.checked,
            "max_deviation": self.max_deviation,
            "worst_permutation": [int(v) + 1 for v in self.worst_permutation],
            "tolerance": self.tolerance,
            "pass": self.passed,
            "seed": self.seed,
        }


def verify_cyclic_trace(
    fam: GadgetFamily,
    tol: float = DEFAULT_TOL,
    sample: int | None = None,
    seed: int = 0,
) -> CyclicTraceReport:
    """Check the cyclic-trace property over permutations of the family.

    Exhaustive up to n = 9 (n! products); larger n requires an explicit
    ``sample`` count and checks a seeded uniform sample of permutations.
    """
    n = fam.n
    if sample is None:
        if n > EXHAUSTIVE_CAP:
            raise ValueError(
                f"exhaustive verification refused for n={n} > {EXHAUSTIVE_CAP}; "
                "pass an explicit sample count"
            )
        perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
        mode = "exhaustive"
        used_seed = None
    else:
        rng = np.random.default_rng(seed)
        perms = np.argsort(rng.random((sample, n)), axis=1).astype(np.int64)
        mode = "sampled"
        used_seed = seed
    traces = kernels.chain_traces(fam.stacked(), perms)
    expected = np.array(
        [1.0 if is_circular(tuple(p)) else 0.0 for p in perms]
    )
    dev = np.abs(traces - expected)
    worst = int(np.argmax(dev))
    return CyclicTraceReport(
        n=n,
        dim=fam.dim,
        kind=fam.kind,
        mode=mode,
        checked=len(perms),
        max_deviation=float(dev[worst]),
        worst_permutation=tuple(int(v) for v in perms[worst]),
        tolerance=tol,
        passed=bool(dev[worst] <= tol),
        seed=used_seed,
    )


def circular_permutations(n: int):
    """All n circular shifts of (0..n-1)."""
    for k in range(n):
        yield tuple((j + k) % n for j in range(n))


def factorial(n: int) -> int:
    return math.factorial(n)
