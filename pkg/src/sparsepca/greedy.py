"""Thresholding baseline and greedy forward-selection solvers.

All routines can work either from a covariance matrix or directly from
a rectangular factor A with A^T A = Sigma (useful when the data matrix
has fewer rows than variables). Indices are 0-based throughout the
library; user-facing layers convert to 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import BadCardinality, EmptyPattern, UnknownMethod


@dataclass(frozen=True)
class SparseComponent:
    """Unit-norm loading vector with explicit support.

    z is zero exactly off the support; variance = z^T Sigma z. The
    penalized objective (variance - rho * |support|) is present only
    when a penalty context exists.
    """

    z: np.ndarray
    support: tuple[int, ...]
    variance: float
    penalized_objective: float | None = None

    @property
    def cardinality(self) -> int:
        return len(self.support)

    def is_zero(self) -> bool:
        return len(self.support) == 0


def zero_component(n: int, penalized: bool = True) -> SparseComponent:
    return SparseComponent(
        z=np.zeros(n),
        support=(),
        variance=0.0,
        penalized_objective=0.0 if penalized else None,
    )


@dataclass
class GreedyPath:
    """Nested sparsity patterns I_1 < I_2 < ... with their components.

    gains[j] is the selection score that led from patterns[j] to
    patterns[j+1]: the exact eigenvalue for the full method, the
    squared inner product (x_k^T a_i)^2 for the approximate one.
    """

    patterns: list[tuple[int, ...]] = field(default_factory=list)
    components: list[SparseComponent] = field(default_factory=list)
    gains: list[float] = field(default_factory=list)

    @property
    def variances(self) -> list[float]:
        return [c.variance for c in self.components]

    def __len__(self) -> int:
        return len(self.patterns)


def _validate_indices(indices, n) -> tuple[int, ...]:
    out = tuple(sorted(int(i) for i in indices))
    if any(i < 0 or i >= n for i in out):
        raise EmptyPattern(f"indices out of range for n={n}: {out}")
    if len(set(out)) != len(out):
        raise EmptyPattern(f"duplicate indices: {out}")
    return out


def pattern_solution(Sigma, indices, rho: float = 0.0) -> SparseComponent:
    """Best unit loading vector restricted to a fixed support.

    z vanishes off the support and equals the leading eigenvector of
    the principal submatrix on it; variance is that submatrix's
    largest eigenvalue. An explicitly empty support yields the zero
    component with objective 0.
    """
    Sigma = linalg.as_symmetric(Sigma)
    n = Sigma.shape[0]
    idx = _validate_indices(indices, n)
    if len(idx) == 0:
        return zero_component(n)
    sub = Sigma[np.ix_(idx, idx)]
    lam, vec = linalg.leading_eig(sub)
    z = np.zeros(n)
    z[list(idx)] = vec
    return SparseComponent(
        z=z,
        support=idx,
        variance=float(lam),
        penalized_objective=float(lam) - rho * len(idx),
    )


def sort_by_variance(Sigma) -> np.ndarray:
    """Permutation ordering the diagonal descending; stable on ties."""
    Sigma = linalg.as_symmetric(Sigma)
    return np.argsort(-np.diag(Sigma), kind="stable")


def threshold_leading(Sigma, k: int) -> SparseComponent:
    """Keep the k largest-magnitude entries of the leading eigenvector.

    Ties go to the lower index; the returned loadings are re-solved on
    the selected support rather than renormalized.
    """
    Sigma = linalg.as_symmetric(Sigma)
    n = Sigma.shape[0]
    if not 1 <= k <= n:
        raise BadCardinality(f"k={k} outside 1..{n}")
    _, x = linalg.leading_eig(Sigma)
    order = np.argsort(-np.abs(x), kind="stable")
    support = sorted(int(i) for i in order[:k])
    return pattern_solution(Sigma, support)


class _Problem:
    """Uniform access to submatrix Grams and factor columns.

    Built from Sigma, a factor A (q x n with A^T A = Sigma), or both.
    The factor is materialized lazily: the full greedy scan only needs
    principal submatrices, which come straight from Sigma when given.
    """

    def __init__(self, Sigma=None, factor=None):
        if Sigma is None and factor is None:
            raise ValueError("need Sigma or factor")
        self.Sigma = None if Sigma is None else linalg.as_symmetric(Sigma)
        self._A = None if factor is None else np.asarray(factor, dtype=float)
        if self._A is not None and self._A.ndim != 2:
            raise ValueError("factor must be 2-D")
        self.n = self.Sigma.shape[0] if self.Sigma is not None else self._A.shape[1]
        if self.Sigma is not None and self._A is not None:
            if self._A.shape[1] != self.n:
                raise ValueError("factor columns must match Sigma dimension")

    @property
    def factor(self) -> np.ndarray:
        if self._A is None:
            self._A = linalg.square_root_factor(self.Sigma)
        return self._A

    def diag(self) -> np.ndarray:
        if self.Sigma is not None:
            return np.diag(self.Sigma).copy()
        return np.einsum("ij,ij->j", self._A, self._A)

    def gram(self, idx: list[int]) -> np.ndarray:
        if self.Sigma is not None:
            return self.Sigma[np.ix_(idx, idx)]
        Asub = self._A[:, idx]
        return Asub.T @ Asub

    def component(self, indices, rho: float = 0.0) -> SparseComponent:
        idx = tuple(sorted(indices))
        if len(idx) == 0:
            return zero_component(self.n)
        lam, vec = linalg.leading_eig(self.gram(list(idx)))
        z = np.zeros(self.n)
        z[list(idx)] = vec
        return SparseComponent(
            z=z,
            support=idx,
            variance=float(lam),
            penalized_objective=float(lam) - rho * len(idx),
        )

    def submax(self, idx: list[int]) -> float:
        return linalg.lambda_max(self.gram(idx))


def _check_k_target(k_target: int, n: int):
    if not 1 <= k_target <= n:
        raise BadCardinality(f"k_target={k_target} outside 1..{n}")


def greedy_full(Sigma, k_target: int, factor=None) -> GreedyPath:
    """Forward selection scanning every remaining variable exactly.

    Starts from the largest-variance variable and at each step adds
    the index maximizing the largest eigenvalue of the grown principal
    submatrix; ties go to the lowest index.
    """
    prob = _Problem(Sigma, factor)
    n = prob.n
    _check_k_target(k_target, n)
    diag = prob.diag()
    first = int(np.argmax(diag))
    selected = [first]
    path = GreedyPath()
    path.patterns.append((first,))
    path.components.append(prob.component(selected))
    for _ in range(1, k_target):
        chosen = prob.n  # sentinel
        best = -np.inf
        for i in range(n):
            if i in selected:
                continue
            lam = prob.submax(sorted(selected + [i]))
            if lam > best:
                best = lam
                chosen = i
        selected.append(chosen)
        pattern = tuple(sorted(selected))
        path.patterns.append(pattern)
        path.components.append(prob.component(pattern))
        path.gains.append(float(best))
    return path


def _leading_direction(prob: _Problem, idx: list[int]) -> np.ndarray:
    """Unit leading eigenvector of sum_{j in idx} a_j a_j^T.

    Computed through the small Gram submatrix: if G z = lam z with
    G = A_I^T A_I then A_I z is an eigenvector of A_I A_I^T.
    """
    A = prob.factor
    _, zvec = linalg.leading_eig(prob.gram(idx))
    v = A[:, idx] @ zvec
    nrm = np.linalg.norm(v)
    if nrm <= 0.0:
        return np.zeros(A.shape[0])
    return linalg.fix_sign(v / nrm)


def greedy_approx(
    Sigma, k_target: int, candidate_width: int = 1, factor=None
) -> GreedyPath:
    """Forward selection scored by squared projection on the current axis.

    At each step the candidate maximizing (x_k^T a_i)^2 is added, where
    x_k is the leading eigenvector of the selected columns' outer-
    product sum. With candidate_width p > 1 the p best-scoring
    candidates are re-ranked by their exact eigenvalues.
    """
    prob = _Problem(Sigma, factor)
    n = prob.n
    _check_k_target(k_target, n)
    if candidate_width < 1:
        raise BadCardinality(f"candidate_width={candidate_width} must be >= 1")
    diag = prob.diag()
    first = int(np.argmax(diag))
    selected = [first]
    path = GreedyPath()
    path.patterns.append((first,))
    path.components.append(prob.component(selected))
    A = prob.factor
    for _ in range(1, k_target):
        x = _leading_direction(prob, sorted(selected))
        proj = A.T @ x
        scores = proj * proj
        in_sel = np.zeros(n, dtype=bool)
        in_sel[selected] = True
        candidates = np.flatnonzero(~in_sel)
        cand_scores = scores[candidates]
        if candidate_width == 1 or len(candidates) == 1:
            pos = int(np.argmax(cand_scores))
            chosen = int(candidates[pos])
        else:
            top = candidates[
                np.argsort(-cand_scores, kind="stable")[: candidate_width]
            ]
            chosen = -1
            best = -np.inf
            for i in sorted(int(t) for t in top):
                lam = prob.submax(sorted(selected + [i]))
                if lam > best:
                    best = lam
                    chosen = i
        selected.append(chosen)
        pattern = tuple(sorted(selected))
        path.patterns.append(pattern)
        path.components.append(prob.component(pattern))
        path.gains.append(float(scores[chosen]))
    return path


_PATH_METHODS = {
    "greedy_full": greedy_full,
    "greedy_approx": greedy_approx,
}


def penalized_path(
    Sigma,
    rho: float,
    method: str = "greedy_full",
    candidate_width: int = 1,
    factor=None,
) -> tuple[SparseComponent, GreedyPath]:
    """Best penalized component along a greedy path.

    Variables whose variance does not exceed rho can never help and
    are pruned up front; the chosen greedy path is then run across the
    survivors and the point maximizing variance - rho * cardinality is
    returned. When rho is at least the largest diagonal entry the zero
    component is optimal.
    """
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    if method not in _PATH_METHODS:
        raise UnknownMethod(f"unknown path method {method!r}")
    prob = _Problem(Sigma, factor)
    n = prob.n
    diag = prob.diag()
    survivors = [int(i) for i in np.flatnonzero(diag > rho)]
    empty = zero_component(n)
    if not survivors:
        return empty, GreedyPath()

    if prob.Sigma is not None:
        sub_sigma = prob.Sigma[np.ix_(survivors, survivors)]
        sub_factor = None if prob._A is None else prob._A[:, survivors]
    else:
        sub_sigma = None
        sub_factor = prob._A[:, survivors]

    kwargs = {"factor": sub_factor}
    if method == "greedy_approx":
        kwargs["candidate_width"] = candidate_width
    sub_path = _PATH_METHODS[method](sub_sigma, len(survivors), **kwargs)

    # map the reduced path back into ambient indexing
    lift = np.asarray(survivors)
    path = GreedyPath(gains=list(sub_path.gains))
    for pattern, comp in zip(sub_path.patterns, sub_path.components):
        ambient = tuple(int(lift[i]) for i in pattern)
        z = np.zeros(n)
        z[list(ambient)] = comp.z[list(pattern)]
        path.patterns.append(ambient)
        path.components.append(
            SparseComponent(
                z=z,
                support=ambient,
                variance=comp.variance,
                penalized_objective=comp.variance - rho * len(ambient),
            )
        )

    best = empty
    for comp in path.components:
        if comp.penalized_objective > best.penalized_objective:
            best = comp
    return best, path
