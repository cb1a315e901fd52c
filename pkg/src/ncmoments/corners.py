"""Square-zero corner embeddings and the scalar machinery behind them.

For a with a^2 = 0 the four operators a*a +- (a + a*) and aa* +- (a + a*)
tie |1 +- a|^p and |1 +- a*|^p to one scalar function

    psi(t) = (1 + (t + sqrt(t^2+4t))/2)^(p/2) + (1 + (t - sqrt(t^2+4t))/2)^(p/2)

whose power series around 0 has coefficients

    lam_n = 2/(2n)! * prod_{k=0}^{n-1} (p^2/4 - k^2),   lam_0 = 2.

Partial sums of the series bound psi from one side, with the side decided
by p and the truncation order; this drives recovery of the even norms
||a||_{2N}^{2N} from p-norm evaluations alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .algebra import (
    abs_power,
    adjoint,
    as_matrix,
    identity,
    normalized_trace,
    operator_norm,
    schatten_pp,
)
from .combinatorics import generalized_binomial
from .reconstruction import NonConvergenceError, richardson_table


class LambdaZeroError(ValueError):
    """The series coefficient needed for the target order vanishes."""


def psi_eval(t: float, p: float) -> float:
    """Closed-form psi(t) for t >= 0.

    The branch base (t - sqrt(t^2+4t))/2 lies in (-1, 0]; rounding can push
    1 + base slightly negative, which is clamped at 0 before the p/2 power.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if p <= 0:
        raise ValueError("p must be positive")
    root = np.sqrt(t * t + 4.0 * t)
    hi = 1.0 + (t + root) / 2.0
    lo = max(1.0 + (t - root) / 2.0, 0.0)
    return float(hi ** (p / 2.0) + lo ** (p / 2.0))


@dataclass(frozen=True)
class PsiSeries:
    """Series coefficients lam_0..lam_N of psi around 0 (radius 4)."""

    p: float
    coefficients: tuple[float, ...]

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def partial_sum(self, t: float) -> float:
        acc = 0.0
        for lam in reversed(self.coefficients):
            acc = acc * t + lam
        return acc


def psi_series(p: float, N: int) -> PsiSeries:
    """Coefficients via lam_{n+1} = lam_n * (p^2/4 - n^2) / ((2n+1)(2n+2))."""
    if N < 0:
        raise ValueError("N must be >= 0")
    if p <= 0:
        raise ValueError("p must be positive")
    lam = 2.0
    out = [lam]
    quarter = p * p / 4.0
    for n in range(N):
        lam = lam * (quarter - n * n) / ((2 * n + 1) * (2 * n + 2))
        out.append(lam)
    return PsiSeries(p=float(p), coefficients=tuple(out))


def psi_eval_series(t: float, p: float, rtol: float = 1e-16, max_terms: int = 600) -> float:
    """Adaptive series evaluation; valid on |t| < 4."""
    if abs(t) >= 4.0:
        raise ValueError("the series only converges for |t| < 4")
    quarter = p * p / 4.0
    lam = 2.0
    acc = lam
    power = 1.0
    small_streak = 0
    for n in range(max_terms):
        lam = lam * (quarter - n * n) / ((2 * n + 1) * (2 * n + 2))
        power *= t
        term = lam * power
        acc += term
        if abs(term) <= rtol * max(abs(acc), 1.0):
            small_streak += 1
            if small_streak >= 4:
                break
        else:
            small_streak = 0
    return float(acc)


def psi_tail_nonnegative(p: float, N: int) -> bool:
    """Sign rule for psi - partial sum of order N: nonnegative iff
    p >= 2N or floor(N - p/2) is odd."""
    return p >= 2 * N or int(np.floor(N - p / 2.0)) % 2 == 1


def psi_tail_sign(t: float, p: float, N: int) -> float:
    """Signed residual psi(t) - sum_{n<=N} lam_n t^n."""
    if t <= 0:
        raise ValueError("t must be positive")
    series = psi_series(p, N)
    return float(psi_eval(t, p) - series.partial_sum(t))


def psi_ode_residual(t: float, p: float, h: float | None = None) -> float:
    """Residual of (t^2+4t) y'' + (t+2) y' - (p^2/4) y at y = psi.

    Derivatives by five-point central differences; the step is capped at
    t/4 so the stencil never leaves the domain.  Three-point stencils at
    smaller steps put the f/h^2 rounding term above the residual budget.
    """
    if h is None:
        h = min(5e-3 * max(t, 1.0), t / 4.0)
    f = lambda s: psi_eval(s, p)
    fm2, fm1, f0, fp1, fp2 = f(t - 2 * h), f(t - h), f(t), f(t + h), f(t + 2 * h)
    d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
    d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h)
    return float((t * t + 4 * t) * d2 + (t + 2) * d1 - p * p / 4.0 * f0)


def cycle_polynomial_P(m: int) -> np.ndarray:
    """Integer coefficients (ascending) of P_m from the recurrence
    P_{m+2} = X (P_{m+1} + P_m), P_1 = X, P_2 = X^2 + 2X."""
    if m < 1:
        raise ValueError("m must be >= 1")
    p1 = np.array([0, 1], dtype=object)
    if m == 1:
        return p1
    p2 = np.array([0, 2, 1], dtype=object)
    if m == 2:
        return p2
    prev, cur = p1, p2
    for _ in range(m - 2):
        size = len(cur) + 1
        nxt = np.zeros(size, dtype=object)
        nxt[1 : len(cur) + 1] += cur
        nxt[1 : len(prev) + 1] += prev
        prev, cur = cur, nxt
    return cur


def cycle_polynomial_closed(m: int, x: float) -> float:
    """((x + sqrt(x^2+4x))/2)^m + ((x - sqrt(x^2+4x))/2)^m for x >= 0."""
    root = np.sqrt(x * x + 4.0 * x)
    return float(((x + root) / 2.0) ** m + ((x - root) / 2.0) ** m)


def poly_eval(coeffs: Sequence, x: float) -> float:
    acc = 0.0
    for c in reversed(list(coeffs)):
        acc = acc * x + float(c)
    return acc


def corner_embed(x) -> np.ndarray:
    """Block matrix [[0, x], [0, 0]]; squares to zero exactly."""
    arr = as_matrix(x)
    d = arr.shape[0]
    out = np.zeros((2 * d, 2 * d), dtype=np.complex128)
    out[:d, d:] = arr
    return out


def corner_quadruple(a) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """The four square-zero combinations a*a +- (a+a*), aa* +- (a+a*)."""
    arr = as_matrix(a)
    h = arr + adjoint(arr)
    gram = adjoint(arr) @ arr
    cogram = arr @ adjoint(arr)
    return (gram + h, gram - h, cogram + h, cogram - h)


def four_term_defect(a, p: float) -> float:
    """Minimum eigenvalue of |1+A|^p + |1-A|^p + |1+A*|^p + |1-A*|^p - 4.

    Nonnegative (up to rounding) for p >= 1; fails for p < 1, e.g. A = [1]
    at p = 1/2 where the sum has eigenvalue 2^{3/2}.
    """
    if p <= 0:
        raise ValueError("p must be positive")
    arr = as_matrix(a)
    d = arr.shape[0]
    eye = identity(d)
    total = np.zeros((d, d), dtype=np.complex128)
    for sign in (1.0, -1.0):
        total += abs_power(eye + sign * arr, p)
        total += abs_power(eye + sign * adjoint(arr), p)
    w = np.linalg.eigvalsh((total + adjoint(total)) / 2.0)
    return float(w[0] - 4.0)


def recover_even_norm(
    pm_powers: Callable[[float], tuple[float, float]],
    p: float,
    N: int,
    lower_norms: Sequence[float],
    t0: float,
    steps: int = 3,
    residual_tol: float | None = 5e-2,
) -> tuple[float, float]:
    """Estimate ||a||_{2N}^{2N} for square-zero a from p-norm evaluations.

    pm_powers(t) must return (||1 + t a||_p^p, ||1 - t a||_p^p); lower_norms
    lists ||a||_{2n}^{2n} for n = 1..N-1.  Evaluates

        g(t) = (plus + minus - 2 - 2 sum_{n<N} lam_n t^{2n} ||a||_{2n}^{2n})
               / (2 lam_N t^{2N})

    on a halving t-ladder and Richardson-extrapolates the even-power error
    away.  Returns (estimate, residual).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if len(lower_norms) != N - 1:
        raise ValueError("lower_norms must list ||a||_{2n}^{2n} for n < N")
    series = psi_series(p, N)
    lam = series.coefficients
    if abs(lam[N]) < 1e-14:
        raise LambdaZeroError(
            f"series coefficient of order {N} vanishes for p={p}"
        )
    values = []
    for i in range(steps + 1):
        t = t0 / 2**i
        plus, minus = pm_powers(t)
        acc = plus + minus - 2.0
        for n in range(1, N):
            acc -= 2.0 * lam[n] * t ** (2 * n) * lower_norms[n - 1]
        values.append(acc / (2.0 * lam[N] * t ** (2 * N)))
    table = richardson_table(values, powers=(2, 4))
    final = table[-1]
    estimate = final[-1]
    residual = abs(final[-1] - final[-2]) if len(final) >= 2 else abs(
        table[-2][-1] - table[-2][-2]
    )
    if residual_tol is not None and residual > residual_tol * max(abs(estimate), 1.0):
        raise NonConvergenceError(
            f"even-norm ladder residual {residual:g} too large"
        )
    return float(np.real(estimate)), float(residual)


def recover_even_norm_of(
    a, p: float, N: int, steps: int = 3
) -> tuple[float, float]:
    """recover_even_norm driver for a concrete square-zero matrix.

    Lower even norms are computed directly; the ladder starts at the
    largest t with (t ||a||)^2 <= 0.1.
    """
    arr = as_matrix(a)
    if operator_norm(arr @ arr) > 1e-12 * max(operator_norm(arr) ** 2, 1e-300):
        raise ValueError("recover_even_norm_of requires a square-zero matrix")
    gram = adjoint(arr) @ arr
    lower = []
    power = np.eye(arr.shape[0], dtype=np.complex128)
    for n in range(1, N):
        power = power @ gram
        lower.append(float(np.real(normalized_trace(power))))
    scale = max(operator_norm(arr), 1e-12)
    t0 = np.sqrt(0.1) / scale
    eye = identity(arr.shape[0])

    def pm(t: float) -> tuple[float, float]:
        return (
            schatten_pp(eye + t * arr, p),
            schatten_pp(eye - t * arr, p),
        )

    return recover_even_norm(pm, p, N, lower, t0, steps=steps)


def truncation_remainder(x, p: float, n: int, r: float) -> float:
    """Operator norm of r^{-n} (|1+rX|^p - Q_n(sum_{j<=n} binom(p/2,j) Y_r^j)).

    Y_r = rX + rX* + r^2 X*X and Q_n drops monomials of r-degree above n.
    The remainder vanishes as r -> 0 for every fixed X.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    if n < 0:
        raise ValueError("n must be >= 0")
    arr = as_matrix(x)
    d = arr.shape[0]
    # polynomial in r with matrix coefficients: degree -> matrix
    xh = adjoint(arr)
    y_poly = {1: arr + xh, 2: xh @ arr}
    zero = np.zeros((d, d), dtype=np.complex128)
    total = {0: identity(d) * generalized_binomial(p / 2.0, 0)}
    power = {0: identity(d)}
    for j in range(1, n + 1):
        nxt: dict[int, np.ndarray] = {}
        for deg, mat in power.items():
            for ydeg, ymat in y_poly.items():
                newdeg = deg + ydeg
                if newdeg > n:
                    continue
                nxt[newdeg] = nxt.get(newdeg, zero) + mat @ ymat
        power = nxt
        coeff = generalized_binomial(p / 2.0, j)
        for deg, mat in power.items():
            total[deg] = total.get(deg, zero) + coeff * mat
    truncated = sum(
        (r**deg) * mat for deg, mat in total.items()
    )
    full = abs_power(identity(d) + r * arr, p)
    return float(operator_norm(full - truncated) / r**n)
