"""Optimality certificates and global bounds for sparse patterns.

Works in factor form: the input is a matrix A whose columns a_i
satisfy A^T A = Sigma. A candidate support I is certified optimal for
the penalized problem at rho_star when the rank-one verification
matrices built from the pattern's leading direction satisfy an
eigenvalue dominance test; the certified objective then equals the
global penalized optimum.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    DegenerateDenominator,
    EmptyGrid,
    EmptyPattern,
    NotUnitNorm,
    TooLarge,
)

UNIT_TOL = 1e-8
CERT_TOL = 1e-8
DENOM_TOL = 1e-12
EXHAUSTIVE_CAP = 2_000_000


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of a pattern optimality check.

    interval is the (low, high) range of admissible penalties; the
    eigenvalue test compares eig_gap_lhs = lambda_max(sum Y_i) against
    eig_gap_rhs = sum_{i in I}(alpha_i - rho_star). certified is True
    only when rho_star lies strictly inside the interval and the test
    passes. objective is the certified penalized value at rho_star.
    """

    pattern: tuple[int, ...]
    rho_star: float
    interval: tuple[float, float]
    eig_gap_lhs: float
    eig_gap_rhs: float
    certified: bool
    objective: float
    x: np.ndarray


@dataclass(frozen=True)
class PenaltyGrid:
    """Penalty values with matching penalized objectives phi(rho)."""

    rho_values: tuple[float, ...]
    phi_values: tuple[float, ...]

    def __post_init__(self):
        if len(self.rho_values) != len(self.phi_values):
            raise ValueError("rho and phi lists must have equal length")
        if any(r < 0 for r in self.rho_values):
            raise ValueError("penalties must be nonnegative")
        if list(self.rho_values) != sorted(self.rho_values):
            raise ValueError("penalties must be ascending")

    def __len__(self) -> int:
        return len(self.rho_values)


def _as_factor(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError("factor must be a 2-D array")
    if not np.isfinite(A).all():
        raise ValueError("factor contains non-finite entries")
    return A


def nonconvex_objective(A, x, rho: float) -> float:
    """Variational form sum_i max((a_i^T x)^2 - rho, 0) at direction x."""
    A = _as_factor(A)
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != A.shape[0]:
        raise ValueError(f"x has length {x.shape[0]}, factor has {A.shape[0]} rows")
    nrm = float(np.linalg.norm(x))
    if abs(nrm - 1.0) > UNIT_TOL:
        raise NotUnitNorm(f"|x| = {nrm:.12g} differs from 1")
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    proj = A.T @ x
    return float(np.maximum(proj * proj - rho, 0.0).sum())


def prune_variables(A, rho: float) -> tuple[int, ...]:
    """Indices whose column variance exceeds rho; others cannot help."""
    A = _as_factor(A)
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    norms2 = np.einsum("ij,ij->j", A, A)
    return tuple(int(i) for i in np.flatnonzero(norms2 > rho))


def pattern_direction(A, indices) -> np.ndarray:
    """Unit leading eigenvector of sum_{i in I} a_i a_i^T.

    Obtained through the |I| x |I| Gram matrix so rectangular factors
    with few rows stay cheap.
    """
    A = _as_factor(A)
    idx = list(indices)
    G = A[:, idx].T @ A[:, idx]
    _, zvec = linalg.leading_eig(G)
    v = A[:, idx] @ zvec
    nrm = float(np.linalg.norm(v))
    if nrm <= 0.0:
        return np.zeros(A.shape[0])
    return linalg.fix_sign(v / nrm)


def certify_pattern(
    A, indices, rho_star: float | None = None, tol_cert: float = CERT_TOL
) -> CertificateReport:
    """Attempt an optimality certificate for support I.

    The pattern's leading direction x gives alignments
    alpha_i = (a_i^T x)^2. Penalties strictly between the best outside
    alignment and the worst inside alignment are admissible; when none
    is supplied the midpoint is used. Inside the interval, rank-one
    matrices Y_i are assembled (in-pattern ones from B_i x with
    B_i = a_i a_i^T - rho I, out-of-pattern ones from the projection
    of a_i off x, skipped when their coefficient is nonpositive) and
    the pattern is certified when lambda_max(sum Y_i) does not exceed
    sum_{i in I} (alpha_i - rho_star).
    """
    A = _as_factor(A)
    q, n = A.shape
    idx = tuple(sorted(int(i) for i in indices))
    if len(idx) == 0:
        raise EmptyPattern("cannot certify an empty pattern")
    if len(set(idx)) != len(idx) or idx[0] < 0 or idx[-1] >= n:
        raise EmptyPattern(f"bad pattern for n={n}: {idx}")

    x = pattern_direction(A, idx)
    alpha = (A.T @ x) ** 2
    inside = np.asarray(idx)
    mask = np.zeros(n, dtype=bool)
    mask[inside] = True
    outside = np.flatnonzero(~mask)

    hi = float(alpha[inside].min())
    lo = float(alpha[outside].max()) if outside.size else 0.0
    if rho_star is None:
        rho_star = 0.5 * (lo + hi)
    rho_star = float(rho_star)

    if not (lo < rho_star < hi):
        return CertificateReport(
            pattern=idx,
            rho_star=rho_star,
            interval=(lo, hi),
            eig_gap_lhs=float("nan"),
            eig_gap_rhs=float("nan"),
            certified=False,
            objective=float("nan"),
            x=x,
        )

    scale = max(1.0, hi)
    Ysum = np.zeros((q, q))
    for i in inside:
        denom = float(alpha[i]) - rho_star
        if denom <= DENOM_TOL * scale:
            raise DegenerateDenominator(
                f"x^T B_{i} x = {denom:.3g} too small to invert"
            )
        a = A[:, i]
        Bx = a * float(a @ x) - rho_star * x
        Ysum += np.outer(Bx, Bx) / denom
    for i in outside:
        a = A[:, i]
        norm2 = float(a @ a)
        coef = rho_star * (norm2 - rho_star) / (rho_star - float(alpha[i]))
        if coef <= 0.0:
            continue
        Pa = a - x * float(x @ a)
        pnorm2 = float(Pa @ Pa)
        if pnorm2 <= DENOM_TOL * max(norm2, 1.0):
            raise DegenerateDenominator(
                f"column {i} is parallel to the pattern direction"
            )
        Ysum += coef * np.outer(Pa, Pa) / pnorm2

    lhs = float(np.linalg.eigvalsh(Ysum)[-1]) if q else 0.0
    rhs = float((alpha[inside] - rho_star).sum())
    certified = lhs <= rhs + tol_cert
    return CertificateReport(
        pattern=idx,
        rho_star=rho_star,
        interval=(lo, hi),
        eig_gap_lhs=lhs,
        eig_gap_rhs=rhs,
        certified=certified,
        objective=rhs,
        x=x,
    )


def weak_duality_bound(grid: PenaltyGrid, k: int) -> float:
    """Upper bound on the k-sparse maximal variance from phi values.

    Any penalized optimum phi(rho) dominates v - rho * k for every
    k-sparse candidate with variance v, so min over the grid of
    phi(rho) + rho * k is a valid bound.
    """
    if len(grid) == 0:
        raise EmptyGrid("penalty grid holds no points")
    if k < 1:
        raise ValueError("k must be >= 1")
    return min(p + r * k for r, p in zip(grid.rho_values, grid.phi_values))


def exhaustive_sparse_eig(Sigma, k: int, cap: int = EXHAUSTIVE_CAP):
    """Exact k-sparse maximal variance by subset enumeration.

    Ties resolve to the lexicographically smallest support. Refuses
    instances with more than cap subsets.
    """
    S = linalg.as_symmetric(Sigma)
    n = S.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k={k} outside 1..{n}")
    count = math.comb(n, k)
    if count > cap:
        raise TooLarge(f"C({n},{k}) = {count} exceeds cap {cap}")
    best_val = -math.inf
    best_pattern = None
    for combo in itertools.combinations(range(n), k):
        sub = S[np.ix_(combo, combo)]
        lam = float(np.linalg.eigvalsh(sub)[-1])
        if lam > best_val:
            best_val = lam
            best_pattern = combo
    return best_val, tuple(best_pattern)
