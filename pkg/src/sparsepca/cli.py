"""Command-line interface.

Thin wrapper over the run layer: parse flags, load the input, call
the matching runner, emit canonical JSON (or CSV for table commands).
Exit codes: 0 success, 1 numerical/domain failure (diagnostic JSON on
stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import io, runs
from .errors import SparsePcaError

_KIND = {"cov": "covariance", "data": "data"}


def _add_input_args(p: argparse.ArgumentParser):
    p.add_argument("--input", required=True, help="CSV matrix path")
    p.add_argument(
        "--input-kind",
        choices=("cov", "data"),
        default="cov",
        help="cov: covariance matrix; data: observation rows",
    )


def _add_solve_args(p: argparse.ArgumentParser):
    p.add_argument(
        "--method",
        required=True,
        choices=("dspca", "greedy", "greedy-approx", "threshold"),
    )
    p.add_argument("--rho", type=float, help="cardinality penalty")
    p.add_argument("--k", type=int, help="target cardinality")
    p.add_argument("--epsilon", type=float, help="dspca duality-gap target")
    p.add_argument("--candidate-width", type=int, default=1)
    p.add_argument("--max-iter", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsepca",
        description="Sparse principal component analysis toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="extract one sparse component")
    _add_input_args(p_solve)
    _add_solve_args(p_solve)
    p_solve.add_argument("--seed", type=int)
    p_solve.add_argument("--out", help="write report JSON here as well")

    p_path = sub.add_parser("path", help="variance vs cardinality table")
    _add_input_args(p_path)
    p_path.add_argument(
        "--method",
        choices=("greedy", "greedy-approx", "threshold"),
        default="greedy",
    )
    p_path.add_argument("--k-max", type=int)
    p_path.add_argument("--candidate-width", type=int, default=1)
    p_path.add_argument("--out", help="write CSV here instead of stdout")

    p_cert = sub.add_parser("certify", help="check a pattern's optimality")
    _add_input_args(p_cert)
    p_cert.add_argument(
        "--pattern", required=True, help="comma-separated 1-based indices, e.g. 1,4,7"
    )
    p_cert.add_argument("--rho-star", type=float)
    p_cert.add_argument("--out")

    p_defl = sub.add_parser("deflate", help="sequential multi-component extraction")
    _add_input_args(p_defl)
    _add_solve_args(p_defl)
    p_defl.add_argument("--components", type=int, required=True)
    p_defl.add_argument("--out")

    p_oracle = sub.add_parser("oracle", help="exhaustive k-sparse optimum")
    _add_input_args(p_oracle)
    p_oracle.add_argument("--k", type=int, required=True)
    p_oracle.add_argument("--out")

    p_exp = sub.add_parser("experiment", help="synthetic studies")
    exp_sub = p_exp.add_subparsers(dest="experiment", required=True)

    p_spiked = exp_sub.add_parser("spiked", help="support-recovery AUROC study")
    p_spiked.add_argument("--n", type=int, default=100)
    p_spiked.add_argument("--k", type=int, default=10)
    p_spiked.add_argument("--m-values", default="25,50,100,200,400")
    p_spiked.add_argument("--trials", type=int, default=20)
    p_spiked.add_argument("--seed", type=int)
    p_spiked.add_argument(
        "--methods", default=",".join(("threshold_pca", "greedy_approx", "greedy_full", "dspca"))
    )
    p_spiked.add_argument("--u-spec", choices=("random_signs", "ones"), default="random_signs")
    p_spiked.add_argument("--rows-out", help="write per-trial rows CSV here")
    p_spiked.add_argument("--out", help="write aggregate JSON here as well")

    p_bounds = exp_sub.add_parser("bounds", help="bound-vs-cardinality sweep")
    p_bounds.add_argument("--family", choices=("rank-one", "gaussian"), required=True)
    p_bounds.add_argument("--n", type=int, default=10)
    p_bounds.add_argument("--q", type=int)
    p_bounds.add_argument("--k-max", type=int, default=5)
    p_bounds.add_argument("--trials", type=int, default=1)
    p_bounds.add_argument("--seed", type=int)
    p_bounds.add_argument("--rows-out", help="write per-k rows CSV here")
    p_bounds.add_argument("--out")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)

    return parser


def _resolve_seed(value):
    if value is not None:
        return int(value)
    env = os.environ.get("SPARSE_PCA_SEED")
    return int(env) if env else None


def _emit_report(report: dict, out_path=None) -> None:
    text = io.canonical_json(report)
    sys.stdout.write(text)
    if out_path:
        io.atomic_write_text(out_path, text)


def _emit_csv(rows, fieldnames, out_path=None) -> None:
    text = io.rows_to_csv(rows, fieldnames)
    if out_path:
        io.atomic_write_text(out_path, text)
    else:
        sys.stdout.write(text)


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "solve":
        loaded = io.load_matrix(args.input, _KIND[args.input_kind])
        report = runs.solve_run(
            loaded,
            args.method,
            rho=args.rho,
            k=args.k,
            epsilon=args.epsilon,
            seed=_resolve_seed(args.seed),
            candidate_width=args.candidate_width,
            max_iter=args.max_iter,
        )
        _emit_report(report, args.out)
        return 0

    if args.command == "path":
        loaded = io.load_matrix(args.input, _KIND[args.input_kind])
        report = runs.path_run(
            loaded,
            method=args.method,
            k_max=args.k_max,
            candidate_width=args.candidate_width,
        )
        _emit_csv(report["rows"], ["k", "variance", "support"], args.out)
        return 0

    if args.command == "certify":
        loaded = io.load_matrix(args.input, _KIND[args.input_kind])
        try:
            pattern = [int(tok) for tok in args.pattern.split(",") if tok.strip()]
        except ValueError:
            raise runs.UsageError(f"--pattern {args.pattern!r} is not a comma list")
        report = runs.certify_run(loaded, pattern, rho_star=args.rho_star)
        _emit_report(report, args.out)
        return 0

    if args.command == "deflate":
        loaded = io.load_matrix(args.input, _KIND[args.input_kind])
        report = runs.deflate_run(
            loaded,
            components=args.components,
            method=args.method,
            rho=args.rho,
            k=args.k,
            epsilon=args.epsilon,
            candidate_width=args.candidate_width,
        )
        _emit_report(report, args.out)
        return 0

    if args.command == "oracle":
        loaded = io.load_matrix(args.input, _KIND[args.input_kind])
        report = runs.oracle_run(loaded, args.k)
        _emit_report(report, args.out)
        return 0

    if args.command == "experiment":
        seed = _resolve_seed(args.seed)
        seed = 0 if seed is None else seed
        if args.experiment == "spiked":
            m_values = [int(tok) for tok in args.m_values.split(",") if tok.strip()]
            methods = [tok.strip() for tok in args.methods.split(",") if tok.strip()]
            report = runs.experiment_spiked_run(
                args.n,
                args.k,
                m_values,
                args.trials,
                seed,
                methods=methods,
                u_spec=args.u_spec,
            )
            if args.rows_out:
                _emit_csv(
                    report["rows"], ["m", "method", "trial", "seed", "auroc"], args.rows_out
                )
            summary = dict(report)
            summary.pop("rows")
            _emit_report(summary, args.out)
            return 0
        report = runs.experiment_bounds_run(
            args.family, args.n, args.k_max, args.trials, seed, q=args.q
        )
        if args.rows_out and report["rows"]:
            _emit_csv(report["rows"], list(report["rows"][0].keys()), args.rows_out)
        _emit_report(report, args.out)
        return 0

    if args.command == "serve":
        import uvicorn

        from .service import app as service_app

        uvicorn.run(service_app, host=args.host, port=args.port)
        return 0

    raise runs.UsageError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except runs.UsageError as exc:
        parser.exit(2, f"{parser.prog}: error: {exc}\n")
    except (SparsePcaError, OSError) as exc:
        diagnostic = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(diagnostic) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
