"""FastAPI wrapper around the run orchestration layer.

Usage errors surface as 422, domain/numerical failures as 400 with a
JSON body naming the error class; reports match the CLI schema.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import io, runs
from .errors import SparsePcaError
from .schemas import (
    CertifyRequest,
    DeflateRequest,
    MatrixPayload,
    OracleRequest,
    PathRequest,
    ReportResponse,
    SolveRequest,
)

app = FastAPI(title="sparsepca", version="0.1.0")


def _loaded(payload: MatrixPayload) -> io.LoadedMatrix:
    return io.matrix_from_values(payload.values, payload.kind, payload.names)


def _run(thunk) -> dict:
    # matrix validation must run inside the guard so malformed payloads
    # surface as 400s rather than unhandled server errors
    try:
        report = thunk()
    except runs.UsageError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except SparsePcaError as exc:
        raise HTTPException(
            status_code=400,
            detail={"error": type(exc).__name__, "message": str(exc)},
        ) from exc
    return io.sanitize(report)


@app.get("/healthz")
def healthz() -> dict:
    return {"status": "ok"}


@app.post("/solve", response_model=ReportResponse, response_model_exclude_none=True)
def solve(req: SolveRequest):
    return _run(
        lambda: runs.solve_run(
            _loaded(req.matrix),
            req.method,
            rho=req.rho,
            k=req.k,
            epsilon=req.epsilon,
            seed=req.seed,
            candidate_width=req.candidate_width,
            max_iter=req.max_iter,
        )
    )


@app.post("/path", response_model=ReportResponse, response_model_exclude_none=True)
def path(req: PathRequest):
    return _run(
        lambda: runs.path_run(
            _loaded(req.matrix),
            method=req.method,
            k_max=req.k_max,
            candidate_width=req.candidate_width,
        )
    )


@app.post("/certify", response_model=ReportResponse, response_model_exclude_none=True)
def certify(req: CertifyRequest):
    return _run(
        lambda: runs.certify_run(_loaded(req.matrix), req.pattern, req.rho_star)
    )


@app.post("/oracle", response_model=ReportResponse, response_model_exclude_none=True)
def oracle(req: OracleRequest):
    return _run(lambda: runs.oracle_run(_loaded(req.matrix), req.k))


@app.post("/deflate", response_model=ReportResponse, response_model_exclude_none=True)
def deflate(req: DeflateRequest):
    return _run(
        lambda: runs.deflate_run(
            _loaded(req.matrix),
            req.components,
            method=req.method,
            rho=req.rho,
            k=req.k,
            epsilon=req.epsilon,
            candidate_width=req.candidate_width,
        )
    )
