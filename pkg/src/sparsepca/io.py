"""CSV ingestion, derived matrices, and canonical report serialization."""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    AsymmetricInput,
    NonPositivePrice,
    ParseError,
    RaggedRows,
    TooFewRows,
)

SYMMETRY_TOL = 1e-6


@dataclass
class LoadedMatrix:
    """Matrix plus optional header names; kind is 'covariance' or 'data'."""

    values: np.ndarray
    names: list[str] | None
    kind: str

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]


def _parse_cell(cell: str, row: int, col: int) -> float:
    try:
        return float(cell.strip())
    except ValueError:
        raise ParseError(
            f"cannot parse {cell.strip()!r} as a number at row {row}, column {col}",
            row=row,
            col=col,
        ) from None


def matrix_from_values(values, kind: str, names: list[str] | None = None) -> LoadedMatrix:
    """Validate an in-memory matrix the same way load_matrix validates CSV."""
    M = np.asarray(values, dtype=float)
    if M.ndim != 2 or M.size == 0:
        raise ParseError("matrix must be 2-D and non-empty")
    if not np.isfinite(M).all():
        raise ParseError("matrix contains non-finite entries")
    if names is not None and len(names) != M.shape[1]:
        raise ParseError(
            f"header names {len(names)} do not match {M.shape[1]} columns"
        )
    if kind == "covariance":
        if M.shape[0] != M.shape[1]:
            raise ParseError(
                f"covariance must be square, got {M.shape[0]}x{M.shape[1]}"
            )
        scale = max(1.0, float(np.abs(M).max()))
        if float(np.abs(M - M.T).max()) > SYMMETRY_TOL * scale:
            raise AsymmetricInput(
                f"input asymmetric beyond {SYMMETRY_TOL:g} relative tolerance"
            )
        M = linalg.as_symmetric(M)
    elif kind != "data":
        raise ValueError(f"unknown matrix kind {kind!r}")
    return LoadedMatrix(values=M, names=list(names) if names else None, kind=kind)


def load_matrix(path, kind: str) -> LoadedMatrix:
    """Read a CSV matrix, optionally headed by variable names.

    The first row is a header when any of its cells fails to parse as
    a number. Covariance inputs must be square and symmetric within
    1e-6 relative tolerance (they are exactly symmetrized on load).
    Parse failures report 1-based row and column.
    """
    with open(path, newline="") as fh:
        raw = [row for row in csv.reader(fh)]
    rows = [
        (i + 1, row) for i, row in enumerate(raw) if any(c.strip() for c in row)
    ]
    if not rows:
        raise ParseError(f"{path}: no rows")

    names = None
    first_row = rows[0][1]
    header_like = False
    for cell in first_row:
        try:
            float(cell.strip())
        except ValueError:
            header_like = True
            break
    if header_like:
        names = [c.strip() for c in first_row]
        rows = rows[1:]
        if not rows:
            raise ParseError(f"{path}: header only, no data rows")

    width = len(rows[0][1])
    data = []
    for rownum, row in rows:
        if len(row) != width:
            raise RaggedRows(
                f"row {rownum} has {len(row)} cells, expected {width}"
            )
        data.append([_parse_cell(c, rownum, j + 1) for j, c in enumerate(row)])
    if names is not None and len(names) != width:
        raise RaggedRows(
            f"header has {len(names)} names, data rows have {width} cells"
        )
    return matrix_from_values(np.asarray(data), kind, names)


def sample_covariance(D) -> np.ndarray:
    """Column-mean-centered covariance normalized by 1/(m-1)."""
    X = np.asarray(D.values if isinstance(D, LoadedMatrix) else D, dtype=float)
    m = X.shape[0]
    if m < 2:
        raise TooFewRows(f"need at least 2 observations, got {m}")
    centered = X - X.mean(axis=0)
    return linalg.as_symmetric(centered.T @ centered / (m - 1))


def log_returns(prices) -> LoadedMatrix:
    """Row-over-row log returns; output has one fewer row."""
    if isinstance(prices, LoadedMatrix):
        P, names = np.asarray(prices.values, dtype=float), prices.names
    else:
        P, names = np.asarray(prices, dtype=float), None
    if P.shape[0] < 2:
        raise TooFewRows(f"need at least 2 price rows, got {P.shape[0]}")
    if not (P > 0).all():
        bad = np.argwhere(P <= 0)[0]
        raise NonPositivePrice(
            f"price at row {bad[0] + 1}, column {bad[1] + 1} is not positive"
        )
    return LoadedMatrix(values=np.log(P[1:] / P[:-1]), names=names, kind="data")


def sanitize(obj):
    """Recursively convert numpy scalars/arrays and non-finite floats.

    NaN and infinities become None so the canonical JSON stays valid.
    """
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [sanitize(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    return obj


def canonical_json(obj) -> str:
    """Deterministic JSON: sorted keys, minimal separators, one newline."""
    return (
        json.dumps(sanitize(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)
        + "\n"
    )


def atomic_write_text(path, text: str):
    """Whole-file write via temp file and rename in the same directory."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def rows_to_csv(rows: list[dict], fieldnames: list[str]) -> str:
    """Render dict rows as CSV text with a header line."""
    import io as _io

    buf = _io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: row.get(k) for k in fieldnames})
    return buf.getvalue()
