"""First-order solver for the penalized semidefinite relaxation.

The primal problem is max Tr(Sigma X) - rho * sum |X_ij| over density
matrices X (PSD, unit trace); its dual minimizes the largest
eigenvalue of Sigma + U over matrices with entries bounded by rho.
The dual objective is smoothed by a log-sum-exp of eigenvalues at
temperature mu, whose gradient is the eigenvalue softmax: a PSD,
unit-trace matrix that doubles as a primal candidate, so a duality
gap is available at every iterate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    InfeasibleDual,
    InfeasiblePrimal,
    NonFiniteIterate,
    NonPositiveMu,
)
from .greedy import SparseComponent, pattern_solution, zero_component

FEAS_TOL = 1e-8
TRACE_TOL = 1e-6


@dataclass
class DspcaConfig:
    """Solver knobs. epsilon is the absolute duality-gap target."""

    rho: float
    epsilon: float = 1e-3
    gap_check_stride: int = 100
    max_iter: int | None = None
    mu_override: float | None = None
    zero_tol: float = 1e-3

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError("rho must be nonnegative")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.gap_check_stride < 1:
            raise ValueError("gap_check_stride must be >= 1")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError("max_iter must be >= 1 when given")
        if self.mu_override is not None and self.mu_override <= 0:
            raise NonPositiveMu(f"mu_override={self.mu_override} must be > 0")


@dataclass
class DspcaResult:
    U_star: np.ndarray
    X_star: np.ndarray
    gap: float
    iterations: int
    component: SparseComponent
    converged: bool
    dual_objective: float
    primal_objective: float
    mu: float
    gap_history: list[tuple[int, float]] = field(default_factory=list)


def default_max_iter(n: int, rho: float, epsilon: float) -> int:
    """Iteration cap scaling like rho * n * sqrt(log n) / epsilon."""
    if n < 1:
        raise DimensionMismatch("n must be >= 1")
    if rho == 0.0:
        return 10_000
    base = rho * n * math.sqrt(math.log(max(n, 2))) / epsilon
    return max(10_000, 10 * math.ceil(base))


def _check_pair(Sigma, U):
    S = linalg.as_symmetric(Sigma)
    V = linalg.as_symmetric(U)
    if S.shape != V.shape:
        raise DimensionMismatch(f"shape mismatch {S.shape} vs {V.shape}")
    return S, V


def smooth_value(Sigma, U, mu: float) -> float:
    S, V = _check_pair(Sigma, U)
    if mu <= 0:
        raise NonPositiveMu(f"mu={mu} must be > 0")
    logtrace, _ = linalg.sym_expm_scaled(S + V, mu)
    return mu * logtrace - mu * math.log(S.shape[0])


def smooth_gradient(Sigma, U, mu: float) -> np.ndarray:
    S, V = _check_pair(Sigma, U)
    if mu <= 0:
        raise NonPositiveMu(f"mu={mu} must be > 0")
    _, softmax = linalg.sym_expm_scaled(S + V, mu)
    return softmax


def duality_gap(Sigma, U, X, rho: float) -> float:
    """Gap between the dual value at U and the primal value at X.

    U must lie in the rho-box and X must be a density matrix (PSD,
    unit trace) up to tolerance; the gap is then a certified bound on
    the suboptimality of either side.
    """
    S, V = _check_pair(Sigma, U)
    Xs = linalg.as_symmetric(X)
    if Xs.shape != S.shape:
        raise DimensionMismatch(f"shape mismatch {S.shape} vs {Xs.shape}")
    box = rho + FEAS_TOL * max(1.0, rho)
    if np.abs(V).max() > box:
        raise InfeasibleDual(
            f"max |U_ij| = {np.abs(V).max():.3g} exceeds rho = {rho:.3g}"
        )
    evals = np.linalg.eigvalsh(Xs)
    lam_hi = max(evals[-1], 1.0)
    if evals[0] < -FEAS_TOL * lam_hi:
        raise InfeasiblePrimal(f"X has eigenvalue {evals[0]:.3g} < 0")
    tr = float(np.trace(Xs))
    if abs(tr - 1.0) > TRACE_TOL:
        raise InfeasiblePrimal(f"trace(X) = {tr:.6g} != 1")
    dual = float(np.linalg.eigvalsh(S + V)[-1])
    primal = float(np.sum(S * Xs)) - rho * float(np.abs(Xs).sum())
    return dual - primal


def extract_component(
    X, Sigma, zero_tol: float = 1e-3, rho: float | None = None
) -> SparseComponent:
    """Sparse loading vector read off a relaxation solution X.

    The dominant eigenvector of X is thresholded at zero_tol times its
    largest magnitude to fix the support, then the loadings and
    variance are re-solved on Sigma restricted to that support. An
    all-zero eigenvector yields the zero component.
    """
    Xs = linalg.as_symmetric(X)
    S = linalg.as_symmetric(Sigma)
    if Xs.shape != S.shape:
        raise DimensionMismatch(f"shape mismatch {Xs.shape} vs {S.shape}")
    _, x = linalg.leading_eig(Xs)
    peak = float(np.abs(x).max())
    n = S.shape[0]
    if peak <= 0.0:
        return zero_component(n, penalized=rho is not None)
    support = np.flatnonzero(np.abs(x) >= zero_tol * peak)
    comp = pattern_solution(S, support, rho=0.0 if rho is None else rho)
    if rho is None:
        comp = SparseComponent(
            z=comp.z,
            support=comp.support,
            variance=comp.variance,
            penalized_objective=None,
        )
    return comp


def _closed_form_zero(S, n, rho, cfg) -> DspcaResult:
    """Exact solution when rho dominates every variance.

    With sigma_max = max_i Sigma_ii <= rho, the dual point
    U = (sigma_max - rho) I - Sigma is inside the box (PSD inputs
    have |Sigma_ij| <= sigma_max) and gives Sigma + U proportional to
    the identity, matching the primal value of the single best
    variable exactly: the gap is zero and the zero component optimal.
    """
    diag = np.diag(S)
    j = int(np.argmax(diag))
    sigma_max = float(diag[j])
    U = linalg.project_box((sigma_max - rho) * np.eye(n) - S, rho)
    X = np.zeros((n, n))
    X[j, j] = 1.0
    dual = float(np.linalg.eigvalsh(S + U)[-1])
    primal = float(np.sum(S * X)) - rho * float(np.abs(X).sum())
    gap = dual - primal
    return DspcaResult(
        U_star=U,
        X_star=X,
        gap=gap,
        iterations=0,
        component=zero_component(n),
        converged=gap <= cfg.epsilon,
        dual_objective=dual,
        primal_objective=primal,
        mu=float("nan"),
        gap_history=[(0, gap)],
    )


def dspca_solve(Sigma, config: DspcaConfig) -> DspcaResult:
    """Run the smoothed first-order method to a target duality gap.

    Returns the best iterate seen. converged=False signals the cap
    was hit before the gap reached epsilon; the result is still a
    valid primal/dual pair with a certified gap.
    """
    S = linalg.as_symmetric(Sigma)
    n = S.shape[0]
    rho = float(config.rho)
    eps = float(config.epsilon)

    diag = np.diag(S)
    sigma_max = float(diag.max()) if n else 0.0
    if rho >= sigma_max:
        return _closed_form_zero(S, n, rho, config)

    if n == 1:
        # rho < Sigma_00: keep the single variable
        U = np.array([[-rho]])
        X = np.array([[1.0]])
        comp = SparseComponent(
            z=np.array([1.0]),
            support=(0,),
            variance=float(S[0, 0]),
            penalized_objective=float(S[0, 0]) - rho,
        )
        val = float(S[0, 0]) - rho
        return DspcaResult(
            U_star=U,
            X_star=X,
            gap=0.0,
            iterations=0,
            component=comp,
            converged=True,
            dual_objective=val,
            primal_objective=val,
            mu=float("nan"),
            gap_history=[(0, 0.0)],
        )

    mu = (
        float(config.mu_override)
        if config.mu_override is not None
        else eps / (2.0 * math.log(n))
    )
    if mu <= 0:
        raise NonPositiveMu(f"mu={mu} must be > 0")
    L = 1.0 / mu
    max_iter = (
        config.max_iter
        if config.max_iter is not None
        else default_max_iter(n, rho, eps)
    )
    stride = config.gap_check_stride

    U = np.zeros((n, n))
    acc = np.zeros((n, n))
    best_gap = math.inf
    best_U = U.copy()
    best_X = np.eye(n) / n
    best_dual = float(np.linalg.eigvalsh(S)[-1])
    iterations = 0
    converged = False
    history: list[tuple[int, float]] = []

    for i in range(max_iter):
        _, grad = linalg.sym_expm_scaled(S + U, mu)
        if not np.isfinite(grad).all():
            raise NonFiniteIterate(f"gradient lost finiteness at iteration {i}")
        if i % stride == 0 or i == max_iter - 1:
            lam = float(np.linalg.eigvalsh(S + U)[-1])
            primal = float(np.sum(S * grad)) - rho * float(np.abs(grad).sum())
            gap = lam - primal
            iterations = i
            history.append((i, gap))
            if gap < best_gap:
                best_gap = gap
                best_U = U.copy()
                best_X = grad.copy()
                best_dual = lam
            if gap <= eps:
                converged = True
                break
        acc += 0.5 * (i + 1) * grad
        Y = linalg.project_box(U - grad / L, rho)
        W = linalg.project_box(-acc / L, rho)
        U = (2.0 / (i + 3)) * W + ((i + 1.0) / (i + 3)) * Y
        if not np.isfinite(U).all():
            raise NonFiniteIterate(f"iterate lost finiteness at iteration {i}")
        iterations = i + 1

    primal = float(np.sum(S * best_X)) - rho * float(np.abs(best_X).sum())
    comp = extract_component(best_X, S, zero_tol=config.zero_tol, rho=rho)
    return DspcaResult(
        U_star=best_U,
        X_star=best_X,
        gap=best_gap,
        iterations=iterations,
        component=comp,
        converged=converged,
        dual_objective=best_dual,
        primal_objective=primal,
        mu=mu,
        gap_history=history,
    )
