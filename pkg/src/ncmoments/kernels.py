"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The backend is chosen once at import time from the environment variable
``NCMOMENTS_BACKEND``:

* ``auto`` (default) - use numba when it is importable, else numpy,
* ``numba``          - require numba, fail loudly if missing,
* ``numpy``          - force the pure-numpy implementations.

Both implementations are always importable under their ``*_numpy`` /
``*_numba`` names so they can be cross-checked and benchmarked against
each other (see ``benchmarks/bench_kernels.py``).
"""

from __future__ import annotations

import os

import numpy as np

_ENV_VAR = "NCMOMENTS_BACKEND"


try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def _select_backend() -> str:
    choice = os.environ.get(_ENV_VAR, "auto").strip().lower()
    if choice not in ("auto", "numba", "numpy"):
        raise RuntimeError(
            f"{_ENV_VAR} must be one of auto|numba|numpy, got {choice!r}"
        )
    if choice == "numpy":
        return "numpy"
    if not HAVE_NUMBA:
        if choice == "numba":
            raise RuntimeError(f"{_ENV_VAR}=numba but numba is not importable")
        return "numpy"
    return "numba"


BACKEND = _select_backend()


# ---------------------------------------------------------------------------
# pure numpy implementations
# ---------------------------------------------------------------------------

def chain_traces_numpy(mats: np.ndarray, orders: np.ndarray) -> np.ndarray:
    """Normalized traces of ordered products.

    mats   : (n, d, d) complex matrices
    orders : (P, n) integer index rows; row (i0..i_{n-1}) selects the
             product mats[i0] @ mats[i1] @ ... @ mats[i_{n-1}]
    returns (P,) complex normalized traces tr_d of each product.
    """
    mats = np.ascontiguousarray(mats, dtype=np.complex128)
    orders = np.asarray(orders, dtype=np.int64)
    n, d, _ = mats.shape
    acc = mats[orders[:, 0]]
    for t in range(1, n):
        acc = acc @ mats[orders[:, t]]
    return np.trace(acc, axis1=1, axis2=2) / d


def schatten_pp_batch_numpy(mats: np.ndarray, p: float) -> np.ndarray:
    """(1/d) * sum(sigma_i^p) for each matrix of a (B, d, d) stack."""
    s = np.linalg.svd(np.asarray(mats, dtype=np.complex128), compute_uv=False)
    return np.mean(s**p, axis=-1)


def grid_phase_mean_numpy(
    terms: np.ndarray, stars: np.ndarray, p: float, r: float, q: int
) -> complex:
    """Phase-weighted grid mean of p-th Schatten powers of identity perturbations.

    For the full grid m in {0..q-1}^n with z_j = r * w^{m_j}, w = exp(2 pi i / q),
    averages  (1/d) sum_i sigma_i(S_z)^p  *  prod_j w^{e_j m_j}
    over the grid, where S_z = I + sum_j z_j terms[j] and the phase exponent is
    e_j = +m_j when stars[j] is set and -m_j otherwise.

    The constant term averages to zero exactly, so the sweep accumulates the
    deviation ||S_z||_p^p - 1 instead: the Gram perturbation S*S - I is
    assembled without the identity and its eigenvalues mu feed
    expm1((p/2) * log1p(mu)), keeping rounding proportional to the deviation
    rather than to 1.  This matters because the target coefficient is O(r^n).
    """
    terms = np.asarray(terms, dtype=np.complex128)
    n, d, _ = terms.shape
    digits = np.indices((q,) * n).reshape(n, -1)  # (n, q^n)
    omega = np.exp(2j * np.pi / q)
    zpow = omega ** digits
    zmat = np.einsum("jg,jab->gab", r * zpow, terms, optimize=True)
    zmat_h = zmat.conj().transpose(0, 2, 1)
    dev = zmat + zmat_h + np.matmul(zmat_h, zmat)
    mu = np.linalg.eigvalsh(dev)
    np.clip(mu, -1.0, None, out=mu)
    with np.errstate(divide="ignore"):
        vals = np.mean(np.expm1((p / 2.0) * np.log1p(mu)), axis=1)
    signs = np.where(np.asarray(stars, dtype=np.int8) != 0, 1, -1)
    phase = omega ** np.einsum("j,jg->g", signs, digits)
    return complex(np.mean(vals * phase))


# ---------------------------------------------------------------------------
# numba implementations (compiled whenever numba is importable; the
# BACKEND flag only decides which set the public names point at)
# ---------------------------------------------------------------------------

if HAVE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def chain_traces_numba(mats, orders):  # pragma: no cover - jitted
        P, n = orders.shape
        d = mats.shape[1]
        out = np.empty(P, dtype=np.complex128)
        acc = np.empty((d, d), dtype=np.complex128)
        tmp = np.empty((d, d), dtype=np.complex128)
        for i in range(P):
            first = orders[i, 0]
            for a in range(d):
                for b in range(d):
                    acc[a, b] = mats[first, a, b]
            for t in range(1, n):
                m = orders[i, t]
                for a in range(d):
                    for b in range(d):
                        s = 0.0 + 0.0j
                        for c in range(d):
                            s += acc[a, c] * mats[m, c, b]
                        tmp[a, b] = s
                swap = acc
                acc = tmp
                tmp = swap
            tr = 0.0 + 0.0j
            for k in range(d):
                tr += acc[k, k]
            out[i] = tr / d
        return out

    @njit(cache=True)
    def schatten_pp_batch_numba(mats, p):  # pragma: no cover - jitted
        B, d, _ = mats.shape
        out = np.empty(B)
        for i in range(B):
            s = np.linalg.svd(mats[i], full_matrices=False)[1]
            acc = 0.0
            for k in range(d):
                acc += s[k] ** p
            out[i] = acc / d
        return out

    @njit(cache=True)
    def grid_phase_mean_numba(terms, stars, p, r, q):  # pragma: no cover - jitted
        n, d, _ = terms.shape
        total = q**n
        omega = complex(np.cos(2.0 * np.pi / q), np.sin(2.0 * np.pi / q))
        powers = np.empty(q, dtype=np.complex128)
        powers[0] = 1.0 + 0.0j
        for k in range(1, q):
            powers[k] = powers[k - 1] * omega
        digits = np.zeros(n, dtype=np.int64)
        acc = 0.0 + 0.0j
        half = p / 2.0
        zmat = np.empty((d, d), dtype=np.complex128)
        for _ in range(total):
            zmat[:, :] = 0.0
            phase_exp = 0
            for j in range(n):
                mj = digits[j]
                z = r * powers[mj]
                for a in range(d):
                    for b in range(d):
                        zmat[a, b] += z * terms[j, a, b]
                if stars[j] != 0:
                    phase_exp += mj
                else:
                    phase_exp -= mj
            zmat_h = np.conj(zmat.T)
            dev = zmat + zmat_h + zmat_h @ zmat
            mu = np.linalg.eigvalsh(dev)
            val = 0.0
            for k in range(d):
                mk = mu[k]
                if mk < -1.0:
                    mk = -1.0
                if mk <= -1.0:
                    val += -1.0
                else:
                    val += np.expm1(half * np.log1p(mk))
            val /= d
            acc += val * powers[phase_exp % q]
            for j in range(n - 1, -1, -1):
                digits[j] += 1
                if digits[j] < q:
                    break
                digits[j] = 0
        return acc / total

if BACKEND == "numba":
    chain_traces = chain_traces_numba
    schatten_pp_batch = schatten_pp_batch_numba
    grid_phase_mean = grid_phase_mean_numba
else:
    chain_traces = chain_traces_numpy
    schatten_pp_batch = schatten_pp_batch_numpy
    grid_phase_mean = grid_phase_mean_numpy
