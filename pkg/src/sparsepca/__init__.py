"""Sparse principal component analysis toolkit.

Penalized semidefinite relaxation with a smoothed first-order solver,
greedy and thresholding baselines, pattern optimality certificates,
global bounds, synthetic experiment harness, and CSV/JSON plumbing.
"""

from .certificates import (
    CertificateReport,
    PenaltyGrid,
    certify_pattern,
    exhaustive_sparse_eig,
    nonconvex_objective,
    prune_variables,
    weak_duality_bound,
)
from .errors import SparsePcaError
from .experiments import (
    BoundSweep,
    RocCurve,
    SpikedInstance,
    StudyResult,
    bound_sweep,
    deflate,
    make_gaussian_gram,
    make_rank_one_noise,
    make_spiked,
    roc_curve,
    spiked_study,
    support_scores,
)
from .greedy import (
    GreedyPath,
    SparseComponent,
    greedy_approx,
    greedy_full,
    pattern_solution,
    penalized_path,
    sort_by_variance,
    threshold_leading,
    zero_component,
)
from .io import LoadedMatrix, load_matrix, log_returns, sample_covariance
from .linalg import (
    lambda_max,
    leading_eig,
    project_box,
    square_root_factor,
    sym_eig,
    sym_expm_scaled,
)
from .solver import (
    DspcaConfig,
    DspcaResult,
    default_max_iter,
    dspca_solve,
    duality_gap,
    extract_component,
    smooth_gradient,
    smooth_value,
)

__version__ = "0.1.0"

__all__ = [
    "BoundSweep",
    "CertificateReport",
    "DspcaConfig",
    "DspcaResult",
    "GreedyPath",
    "LoadedMatrix",
    "PenaltyGrid",
    "RocCurve",
    "SparseComponent",
    "SparsePcaError",
    "SpikedInstance",
    "StudyResult",
    "bound_sweep",
    "certify_pattern",
    "default_max_iter",
    "deflate",
    "dspca_solve",
    "duality_gap",
    "exhaustive_sparse_eig",
    "extract_component",
    "greedy_approx",
    "greedy_full",
    "lambda_max",
    "leading_eig",
    "load_matrix",
    "log_returns",
    "make_gaussian_gram",
    "make_rank_one_noise",
    "make_spiked",
    "nonconvex_objective",
    "pattern_solution",
    "penalized_path",
    "project_box",
    "prune_variables",
    "roc_curve",
    "sample_covariance",
    "smooth_gradient",
    "smooth_value",
    "sort_by_variance",
    "spiked_study",
    "square_root_factor",
    "support_scores",
    "sym_eig",
    "sym_expm_scaled",
    "threshold_leading",
    "weak_duality_bound",
    "zero_component",
]
