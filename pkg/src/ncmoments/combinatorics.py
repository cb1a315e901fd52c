"""Generalized binomials and the weight attached to a recovered moment.

The scalar in front of a recovered word trace is

    C(p, N, alpha) = sum_{k=0..alpha} (N-k) * binom(p/2, N-k) * binom(alpha, k)

where alpha is the cyclic count of (star, plain) transitions in the word's
star pattern.  C is nonzero whenever p is not an even integer, or when
p >= 2(N - alpha); the root structure of the underlying degree-(N-1)
polynomial makes this checkable by direct evaluation at integers.

All coefficient arithmetic runs over exact rationals (every float is a
ratio of integers), converting to float only on return.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


def generalized_binomial(beta, k: int) -> float:
    """binom(beta, k) = beta (beta-1) ... (beta-k+1) / k! for k >= 0."""
    return float(_binomial_exact(Fraction(beta), k))


def _binomial_exact(beta: Fraction, k: int) -> Fraction:
    if k < 0:
        return Fraction(0)
    acc = Fraction(1)
    for i in range(k):
        acc *= beta - i
        acc /= i + 1
    return acc


def alpha_count(stars: Sequence[bool]) -> int:
    """Cyclic count of positions j with stars[j] and not stars[j+1 mod n]."""
    n = len(stars)
    if n == 0:
        raise ValueError("star pattern must be nonempty")
    return sum(
        1 for j in range(n) if stars[j] and not stars[(j + 1) % n]
    )


@dataclass(frozen=True)
class MomentCoefficientQuery:
    p: float
    N: int
    alpha: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if not 0 <= self.alpha <= self.N // 2:
            raise ValueError("alpha must satisfy 0 <= alpha <= N/2")
        if not self.p > 0:
            raise ValueError("p must be positive")


def moment_coefficient(p, N: int, alpha: int) -> float:
    """C(p, N, alpha); exact rational evaluation, float on return."""
    MomentCoefficientQuery(float(p), N, alpha)
    half = Fraction(p) / 2
    acc = Fraction(0)
    for k in range(alpha + 1):
        acc += (N - k) * _binomial_exact(half, N - k) * _binomial_exact(
            Fraction(alpha), k
        )
    return float(acc)


@dataclass(frozen=True)
class RootReport:
    N: int
    alpha: int
    degree: int
    roots: tuple[int, ...]
    evaluations: tuple[float, ...]
    passed: bool

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "alpha": self.alpha,
            "degree": self.degree,
            "roots": list(self.roots),
            "abs_values": list(self.evaluations),
            "pass": self.passed,
        }


def coefficient_root_report(N: int, alpha: int, tol: float = 1e-8) -> RootReport:
    """Evaluate P(beta) = sum_k binom(beta, N-k-1) binom(alpha, k) at the
    integers beta in [-alpha, N-alpha-2] and report the magnitudes.

    These N-1 integers exhaust the roots of the degree-(N-1) polynomial P,
    which is why C(p, N, alpha) = (p/2) * P(p/2 - 1) cannot vanish for
    p/2 - 1 outside that set.  Evaluation is exact, so a pass means the
    values are literal zeros.
    """
    if not 1 <= N <= 12:
        raise ValueError("N must be in 1..12")
    if not 0 <= alpha <= N / 2:
        raise ValueError("alpha must satisfy 0 <= alpha <= N/2")
    roots = tuple(range(-alpha, N - alpha - 1))
    values = []
    for beta in roots:
        acc = Fraction(0)
        for k in range(alpha + 1):
            acc += _binomial_exact(Fraction(beta), N - k - 1) * _binomial_exact(
                Fraction(alpha), k
            )
        values.append(abs(float(acc)))
    passed = all(v <= tol for v in values)
    return RootReport(
        N=N,
        alpha=alpha,
        degree=N - 1,
        roots=roots,
        evaluations=tuple(values),
        passed=passed,
    )


def star_patterns(n: int):
    """All 2^n star patterns of length n as boolean tuples."""
    for mask in range(2**n):
        yield tuple(bool((mask >> j) & 1) for j in range(n))
