"""Complex square-matrix algebra under the normalized trace.

All operators live in M_d equipped with tr_d(M) = (1/d) * sum of the
diagonal, so tr_d(I) = 1 and the Schatten p-norm is
``(tr_d(|M|^p))^(1/p)``.  Words in a family of matrices are encoded as
sequences of (index, star) letters with 1-based indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

HERMITIAN_RTOL = 1e-10

# one letter of a star word: (1-based family index, adjoint flag)
Letter = tuple[int, bool]
StarWord = tuple[Letter, ...]


def as_matrix(m) -> np.ndarray:
    """Validate and return a square complex matrix (copy-free when possible)."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if not (np.all(np.isfinite(arr.real)) and np.all(np.isfinite(arr.imag))):
        raise ValueError("matrix entries must be finite")
    return arr


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128)


def matrix_unit(dim: int, row: int, col: int) -> np.ndarray:
    """e_{row,col} with 0-based indices."""
    m = np.zeros((dim, dim), dtype=np.complex128)
    m[row, col] = 1.0
    return m


def adjoint(m: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(m.conj().T)


def normalized_trace(m) -> complex:
    arr = as_matrix(m)
    return complex(np.trace(arr) / arr.shape[0])


def operator_norm(m) -> float:
    return float(np.linalg.norm(as_matrix(m), 2))


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product tr_d(a* b) under the normalized trace."""
    return complex(np.sum(a.conj() * b) / a.shape[0])


def singular_values(m) -> np.ndarray:
    """Singular values in non-increasing order."""
    return np.linalg.svd(as_matrix(m), compute_uv=False)


@dataclass(frozen=True)
class SingularProfile:
    """Non-increasing singular values read as a step function on [0, 1).

    ``value_at(t)`` returns values[floor(t * dim)], so each singular value
    occupies a mass-1/dim interval.
    """

    dim: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (self.dim,):
            raise ValueError("profile length must equal dim")
        if np.any(vals < -1e-14) or np.any(np.diff(vals) > 1e-12):
            raise ValueError("profile must be non-negative and non-increasing")
        object.__setattr__(self, "values", np.maximum(vals, 0.0))

    def value_at(self, t: float) -> float:
        if not 0.0 <= t < 1.0:
            raise ValueError("t must lie in [0, 1)")
        return float(self.values[int(t * self.dim)])

    def power_integral(self, p: float) -> float:
        """Riemann sum of value_at(t)^p over the step profile."""
        return float(np.mean(self.values**p))


def singular_profile(m) -> SingularProfile:
    arr = as_matrix(m)
    return SingularProfile(arr.shape[0], singular_values(arr))


def schatten_p_norm(m, p: float) -> float:
    """(tr_d(|m|^p))^(1/p) for p > 0."""
    if not np.isfinite(p) or p <= 0:
        raise ValueError(f"p must be finite and positive, got {p}")
    return float(schatten_pp(m, p) ** (1.0 / p))


def schatten_pp(m, p: float) -> float:
    """The p-th power tr_d(|m|^p) = (1/d) * sum(sigma_i^p)."""
    if not np.isfinite(p) or p <= 0:
        raise ValueError(f"p must be finite and positive, got {p}")
    s = singular_values(m)
    return float(np.mean(s**p))


def check_word(word: Sequence[Letter], family_size: int) -> StarWord:
    out = []
    for letter in word:
        idx, star = letter
        idx = int(idx)
        if not 1 <= idx <= family_size:
            raise IndexError(
                f"word letter index {idx} outside family of size {family_size}"
            )
        out.append((idx, bool(star)))
    return tuple(out)


def word_matrix(family: Sequence[np.ndarray], word: Sequence[Letter]) -> np.ndarray:
    """Ordered product x_{i1}^{e1} ... x_{ik}^{ek}; empty word gives the identity."""
    mats = [as_matrix(m) for m in family]
    if not mats:
        raise ValueError("family must be nonempty to evaluate a word matrix")
    dim = mats[0].shape[0]
    if any(m.shape[0] != dim for m in mats):
        raise ValueError("family members must share one dimension")
    letters = check_word(word, len(mats))
    acc = identity(dim)
    for idx, star in letters:
        factor = adjoint(mats[idx - 1]) if star else mats[idx - 1]
        acc = acc @ factor
    return acc


def word_trace(family: Sequence[np.ndarray], word: Sequence[Letter]) -> complex:
    """Normalized trace of the star word evaluated in the family.

    The empty word returns 1 (trace of the identity).
    """
    if len(word) == 0:
        return 1.0 + 0.0j
    return normalized_trace(word_matrix(family, word))


def is_hermitian(m: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    scale = np.linalg.norm(m)
    return np.linalg.norm(m - m.conj().T) <= rtol * max(scale, 1e-300)


def hermitian_apply(m, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Spectral application of a scalar function to a Hermitian matrix.

    The input is symmetrized before the eigendecomposition; inputs farther
    than HERMITIAN_RTOL (relative) from Hermitian are rejected.
    """
    arr = as_matrix(m)
    if not is_hermitian(arr):
        raise ValueError("hermitian_apply requires a (numerically) Hermitian matrix")
    sym = (arr + arr.conj().T) / 2.0
    w, v = np.linalg.eigh(sym)
    fw = np.asarray(f(w), dtype=np.complex128)
    return (v * fw) @ v.conj().T


def abs_power(m, p: float) -> np.ndarray:
    """|m|^p = (m* m)^(p/2) via the Hermitian functional calculus."""
    arr = as_matrix(m)
    gram = arr.conj().T @ arr
    return hermitian_apply(gram, lambda w: np.maximum(w, 0.0) ** (p / 2.0))


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; tr of a tensor factors into normalized traces."""
    return np.kron(a, b)
