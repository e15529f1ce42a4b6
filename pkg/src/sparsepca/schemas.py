"""Request/response models for the HTTP service."""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field


class MatrixPayload(BaseModel):
    """Inline matrix: covariance (square) or raw data rows."""

    values: list[list[float]]
    kind: Literal["covariance", "data"] = "covariance"
    names: Optional[list[str]] = None


class SolveRequest(BaseModel):
    matrix: MatrixPayload
    method: Literal["dspca", "greedy", "greedy-approx", "threshold"]
    rho: Optional[float] = None
    k: Optional[int] = None
    epsilon: Optional[float] = None
    seed: Optional[int] = None
    candidate_width: int = Field(default=1, ge=1)
    max_iter: Optional[int] = Field(default=None, ge=1)


class PathRequest(BaseModel):
    matrix: MatrixPayload
    method: Literal["greedy", "greedy-approx", "threshold"] = "greedy"
    k_max: Optional[int] = Field(default=None, ge=1)
    candidate_width: int = Field(default=1, ge=1)


class CertifyRequest(BaseModel):
    matrix: MatrixPayload
    pattern: list[int] = Field(min_length=1, description="1-based indices")
    rho_star: Optional[float] = None


class OracleRequest(BaseModel):
    matrix: MatrixPayload
    k: int = Field(ge=1)


class DeflateRequest(BaseModel):
    matrix: MatrixPayload
    components: int = Field(ge=1)
    method: Literal["dspca", "greedy", "greedy-approx", "threshold"] = "greedy"
    rho: Optional[float] = None
    k: Optional[int] = None
    epsilon: Optional[float] = None
    candidate_width: int = Field(default=1, ge=1)


class ComponentModel(BaseModel):
    support: list[int]
    loadings: list[float]
    variance: float
    penalized_objective: Optional[float] = None
    names: Optional[list[str]] = None


class ReportResponse(BaseModel):
    """Envelope mirroring the CLI JSON schema."""

    method: str
    params: dict[str, Any]
    seed: Optional[int] = None
    components: list[ComponentModel]
    bounds: dict[str, Any]
    timing_ms: float
    rows: Optional[list[dict[str, Any]]] = None
    aggregates: Optional[list[dict[str, Any]]] = None
    names: Optional[list[str]] = None
