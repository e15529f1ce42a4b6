"""Dense symmetric linear-algebra kernel.

Eigendecomposition with a deterministic sign convention, an
overflow-safe scaled matrix exponential, square-root factorization,
and the entrywise box projection. Everything here is a pure function
of numpy arrays; matrices are symmetrized on entry.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DimensionMismatch,
    NonFiniteInput,
    NonPositiveMu,
    NotPositiveSemidefinite,
)

TOL_EIG = 1e-10
TOL_FACT = 1e-10
TOL_PSD = 1e-8


def _check_finite(M, name="input"):
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise NonFiniteInput(f"{name} contains NaN or Inf")
    return M


def as_symmetric(M) -> np.ndarray:
    """Return (M + M^T)/2 as a float array, validating shape and finiteness."""
    M = _check_finite(M, "matrix")
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    return 0.5 * (M + M.T)


def fix_sign(v: np.ndarray) -> np.ndarray:
    """Flip a vector so its largest-magnitude entry is positive.

    Ties resolve to the lowest index. Zero vectors pass through.
    """
    v = np.asarray(v, dtype=float)
    idx = int(np.argmax(np.abs(v)))
    if v[idx] < 0:
        return -v
    return v


def sym_eig(S) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    Returns
    -------
    values : (n,) array, sorted descending
    vectors : (n, n) array, orthonormal columns, column j pairs with
        values[j]; each column sign-fixed (largest-|entry| positive).

    The descending order uses a stable sort so degenerate eigenvalues
    keep the order the decomposition routine produced.
    """
    S = as_symmetric(S)
    w, Q = np.linalg.eigh(S)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    Q = Q[:, order]
    for j in range(Q.shape[1]):
        Q[:, j] = fix_sign(Q[:, j])
    return w, Q


def leading_eig(S) -> tuple[float, np.ndarray]:
    """Largest eigenvalue and its (sign-fixed) unit eigenvector."""
    w, Q = sym_eig(S)
    return float(w[0]), Q[:, 0]


def lambda_max(S) -> float:
    S = as_symmetric(S)
    return float(np.linalg.eigvalsh(S)[-1])


def sym_expm_scaled(S, mu: float) -> tuple[float, np.ndarray]:
    """Overflow-safe softmax of a symmetric matrix at temperature mu.

    Returns
    -------
    logtrace : log Tr exp(S/mu), evaluated by shifting eigenvalues by
        their maximum before exponentiating so large entries cannot
        overflow.
    softmax_matrix : exp(S/mu) / Tr exp(S/mu); PSD with unit trace.
    """
    if not np.isscalar(mu) or not np.isfinite(mu) or mu <= 0:
        raise NonPositiveMu(f"mu must be a positive real, got {mu!r}")
    S = as_symmetric(S)
    w, Q = np.linalg.eigh(S)
    d = w / mu
    d_max = d[-1]
    expd = np.exp(d - d_max)
    total = expd.sum()
    logtrace = float(d_max + np.log(total))
    weights = expd / total
    softmax = (Q * weights) @ Q.T
    return logtrace, 0.5 * (softmax + softmax.T)


def square_root_factor(S) -> np.ndarray:
    """A with A^T A = S, via Cholesky when possible, else eigen square root.

    Negative eigenvalues within -TOL_PSD * lambda_max are clipped to
    zero; anything below that raises NotPositiveSemidefinite.
    """
    S = as_symmetric(S)
    try:
        L = np.linalg.cholesky(S)
        return L.T
    except np.linalg.LinAlgError:
        pass
    w, Q = np.linalg.eigh(S)
    lam_max = max(w[-1], 0.0)
    floor = -TOL_PSD * max(lam_max, 1.0)
    if w[0] < floor:
        raise NotPositiveSemidefinite(
            f"eigenvalue {w[0]:.3e} below PSD tolerance {floor:.3e}"
        )
    A = (Q * np.sqrt(np.clip(w, 0.0, None))) @ Q.T
    return 0.5 * (A + A.T)


def project_box(V, rho: float) -> np.ndarray:
    """Entrywise clamp of a symmetric matrix to the box |V_ij| <= rho."""
    V = as_symmetric(V)
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    return np.clip(V, -rho, rho)
