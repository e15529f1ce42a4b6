"""Shared orchestration for the CLI and the HTTP service.

Every runner takes validated inputs, drives the core modules, and
returns a plain-dict report using 1-based variable indexing so both
front ends serialize identical artifacts.
"""

from __future__ import annotations

import math
import time

import numpy as np

from . import certificates as cert
from . import experiments, greedy, io, linalg, solver
from .errors import BadCardinality


class UsageError(ValueError):
    """Bad argument combination; front ends map this to exit code 2/422."""


CLI_METHODS = ("dspca", "greedy", "greedy-approx", "threshold")
_GREEDY_NAMES = {"greedy": "greedy_full", "greedy-approx": "greedy_approx"}


def sigma_and_names(loaded: io.LoadedMatrix):
    """Covariance view of an input: data matrices get sample covariance."""
    if loaded.kind == "covariance":
        return loaded.values, loaded.names
    return io.sample_covariance(loaded), loaded.names


def factor_and_names(loaded: io.LoadedMatrix):
    """Factor A with A^T A = Sigma; data inputs use the centered rows."""
    if loaded.kind == "covariance":
        return linalg.square_root_factor(loaded.values), loaded.names
    X = loaded.values
    if X.shape[0] < 2:
        return linalg.square_root_factor(io.sample_covariance(loaded)), loaded.names
    centered = X - X.mean(axis=0)
    return centered / math.sqrt(X.shape[0] - 1), loaded.names


def component_dict(comp: greedy.SparseComponent, names=None) -> dict:
    out = {
        "support": [i + 1 for i in comp.support],
        "loadings": [float(comp.z[i]) for i in comp.support],
        "variance": comp.variance,
        "penalized_objective": comp.penalized_objective,
    }
    if names:
        out["names"] = [names[i] for i in comp.support]
    return out


def _report(method, params, seed, components, bounds, started) -> dict:
    return {
        "method": method,
        "params": params,
        "seed": seed,
        "components": components,
        "bounds": bounds,
        "timing_ms": (time.perf_counter() - started) * 1000.0,
    }


def _require(cond: bool, message: str):
    if not cond:
        raise UsageError(message)


def solve_run(
    loaded: io.LoadedMatrix,
    method: str,
    rho: float | None = None,
    k: int | None = None,
    epsilon: float | None = None,
    seed: int | None = None,
    candidate_width: int = 1,
    max_iter: int | None = None,
) -> dict:
    """Single-component solve with any of the four methods."""
    started = time.perf_counter()
    _require(method in CLI_METHODS, f"method must be one of {CLI_METHODS}")
    S, names = sigma_and_names(loaded)
    n = S.shape[0]
    params: dict = {"n": n, "method": method}
    bounds: dict = {}

    if method == "dspca":
        _require(rho is not None, "dspca requires --rho")
        _require(k is None, "dspca takes --rho, not --k")
        cfg_kwargs = {"rho": float(rho)}
        if epsilon is not None:
            cfg_kwargs["epsilon"] = float(epsilon)
        if max_iter is not None:
            cfg_kwargs["max_iter"] = int(max_iter)
        cfg = solver.DspcaConfig(**cfg_kwargs)
        result = solver.dspca_solve(S, cfg)
        comp = result.component
        params.update(
            {
                "rho": cfg.rho,
                "epsilon": cfg.epsilon,
                "iterations": result.iterations,
            }
        )
        bounds = {
            "gap": result.gap,
            "upper": result.dual_objective,
            "converged": result.converged,
        }
    elif method == "threshold":
        _require(k is not None, "threshold requires --k")
        _require(rho is None, "threshold takes --k, not --rho")
        comp = greedy.threshold_leading(S, int(k))
        params["k"] = int(k)
    else:
        inner = _GREEDY_NAMES[method]
        _require(
            (rho is None) != (k is None),
            f"{method} requires exactly one of --rho / --k",
        )
        if method == "greedy-approx":
            params["candidate_width"] = int(candidate_width)
        if k is not None:
            params["k"] = int(k)
            if inner == "greedy_full":
                path = greedy.greedy_full(S, int(k))
            else:
                path = greedy.greedy_approx(
                    S, int(k), candidate_width=int(candidate_width)
                )
            comp = path.components[-1]
        else:
            params["rho"] = float(rho)
            comp, _ = greedy.penalized_path(
                S, float(rho), method=inner, candidate_width=int(candidate_width)
            )
    return _report(method, params, seed, [component_dict(comp, names)], bounds, started)


def path_run(
    loaded: io.LoadedMatrix,
    method: str = "greedy",
    k_max: int | None = None,
    candidate_width: int = 1,
) -> dict:
    """Variance-versus-cardinality table for a path method."""
    started = time.perf_counter()
    _require(
        method in ("greedy", "greedy-approx", "threshold"),
        "path methods are greedy, greedy-approx, threshold",
    )
    S, names = sigma_and_names(loaded)
    n = S.shape[0]
    k_max = n if k_max is None else int(k_max)
    if not 1 <= k_max <= n:
        raise BadCardinality(f"k_max={k_max} outside 1..{n}")
    rows = []
    if method == "threshold":
        comps = [greedy.threshold_leading(S, k) for k in range(1, k_max + 1)]
    else:
        inner = _GREEDY_NAMES[method]
        if inner == "greedy_full":
            path = greedy.greedy_full(S, k_max)
        else:
            path = greedy.greedy_approx(S, k_max, candidate_width=candidate_width)
        comps = path.components
    for k, comp in enumerate(comps, start=1):
        rows.append(
            {
                "k": k,
                "variance": comp.variance,
                "support": ";".join(str(i + 1) for i in comp.support),
            }
        )
    report = _report(
        f"path:{method}", {"n": n, "k_max": k_max}, None, [], {}, started
    )
    report["rows"] = rows
    if names:
        report["names"] = names
    return report


def certify_run(
    loaded: io.LoadedMatrix, pattern_1based, rho_star: float | None = None
) -> dict:
    """Optimality certificate for a 1-based support pattern."""
    started = time.perf_counter()
    A, names = factor_and_names(loaded)
    n = A.shape[1]
    _require(len(pattern_1based) > 0, "--pattern must list at least one index")
    _require(
        all(1 <= int(i) <= n for i in pattern_1based),
        f"pattern indices must be in 1..{n}",
    )
    pattern = [int(i) - 1 for i in pattern_1based]
    report = cert.certify_pattern(A, pattern, rho_star=rho_star)
    S, _ = sigma_and_names(loaded)
    comp = greedy.pattern_solution(S, pattern, rho=report.rho_star)
    bounds = {
        "certified": report.certified,
        "rho_star": report.rho_star,
        "interval": list(report.interval),
        "eig_gap_lhs": report.eig_gap_lhs,
        "eig_gap_rhs": report.eig_gap_rhs,
        "objective": report.objective,
    }
    params = {"n": n, "pattern": [int(i) for i in pattern_1based]}
    if rho_star is not None:
        params["rho_star"] = float(rho_star)
    return _report(
        "certify", params, None, [component_dict(comp, names)], bounds, started
    )


def oracle_run(loaded: io.LoadedMatrix, k: int) -> dict:
    """Exhaustive k-sparse optimum."""
    started = time.perf_counter()
    S, names = sigma_and_names(loaded)
    value, pattern = cert.exhaustive_sparse_eig(S, int(k))
    comp = greedy.pattern_solution(S, pattern)
    return _report(
        "oracle",
        {"n": S.shape[0], "k": int(k)},
        None,
        [component_dict(comp, names)],
        {"value": value},
        started,
    )


def deflate_run(
    loaded: io.LoadedMatrix,
    components: int,
    method: str = "greedy",
    rho: float | None = None,
    k: int | None = None,
    epsilon: float | None = None,
    candidate_width: int = 1,
) -> dict:
    """Sequential extraction: solve, deflate, repeat."""
    started = time.perf_counter()
    _require(components >= 1, "--components must be >= 1")
    S, names = sigma_and_names(loaded)
    work = S.copy()
    out = []
    total_variance = 0.0
    for _ in range(components):
        step = solve_run(
            io.LoadedMatrix(values=work, names=names, kind="covariance"),
            method,
            rho=rho,
            k=k,
            epsilon=epsilon,
            candidate_width=candidate_width,
        )
        entry = step["components"][0]
        out.append(entry)
        total_variance += entry["variance"]
        if not entry["support"]:
            break
        zfull = np.zeros(S.shape[0])
        zfull[[i - 1 for i in entry["support"]]] = entry["loadings"]
        work = experiments.deflate(work, zfull)
    params = {
        "n": S.shape[0],
        "components": components,
        "method": method,
        "total_variance": total_variance,
        "trace": float(np.trace(S)),
    }
    if rho is not None:
        params["rho"] = float(rho)
    if k is not None:
        params["k"] = int(k)
    return _report("deflate", params, None, out, {}, started)


def experiment_spiked_run(
    n: int,
    k: int,
    m_values,
    trials: int,
    seed: int,
    methods=None,
    u_spec: str = "random_signs",
) -> dict:
    """Spiked-model support-recovery study; rows plus aggregates."""
    started = time.perf_counter()
    methods = tuple(methods) if methods else experiments.STUDY_METHODS
    study = experiments.spiked_study(
        n, k, list(m_values), trials, methods=methods, seed=seed, u_spec=u_spec
    )
    report = _report(
        "experiment:spiked",
        {
            "n": n,
            "k": k,
            "m_values": [int(m) for m in m_values],
            "trials": trials,
            "methods": list(methods),
            "u_spec": u_spec,
        },
        seed,
        [],
        {},
        started,
    )
    report["rows"] = study.rows
    report["aggregates"] = study.aggregates
    return report


def experiment_bounds_run(
    family: str, n: int, k_max: int, trials: int, seed: int, q: int | None = None
) -> dict:
    """Bound-vs-cardinality sweep over a named random matrix family."""
    started = time.perf_counter()
    _require(family in ("rank-one", "gaussian"), "family is rank-one or gaussian")
    rows = []
    for trial in range(trials):
        instance_seed = int(seed) ^ trial
        if family == "rank-one":
            S = experiments.make_rank_one_noise(n, instance_seed)
        else:
            S = experiments.make_gaussian_gram(n, q if q else n, instance_seed)
        sweep = experiments.bound_sweep(S, k_max)
        min_upper = sweep.min_upper()
        for i, k in enumerate(sweep.cardinalities):
            row = {"trial": trial, "seed": instance_seed, "k": k}
            for name, vals in sweep.lower_bounds.items():
                row[f"lower_{name}"] = vals[i]
            for name, vals in sweep.upper_bounds.items():
                row[f"upper_{name}"] = vals[i]
            row["min_upper"] = min_upper[i]
            rows.append(row)
    report = _report(
        "experiment:bounds",
        {"family": family, "n": n, "k_max": k_max, "trials": trials, "q": q},
        seed,
        [],
        {},
        started,
    )
    report["rows"] = rows
    return report
