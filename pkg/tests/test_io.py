"""CSV loading, derived matrices, canonical serialization."""

import json
import os

import numpy as np
import pytest

from oracles import two_pass_covariance
from sparsepca.errors import (
    AsymmetricInput,
    NonPositivePrice,
    ParseError,
    RaggedRows,
    TooFewRows,
)
from sparsepca.io import (
    LoadedMatrix,
    atomic_write_text,
    canonical_json,
    load_matrix,
    log_returns,
    matrix_from_values,
    rows_to_csv,
    sample_covariance,
    sanitize,
)


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestLoadMatrix:
    def test_headed_covariance(self, tmp_path):
        path = write(tmp_path, "c.csv", "a,b\n2.0,0.5\n0.5,1.0\n")
        loaded = load_matrix(path, "covariance")
        assert loaded.kind == "covariance"
        assert loaded.names == ["a", "b"]
        assert np.array_equal(loaded.values, [[2.0, 0.5], [0.5, 1.0]])

    def test_headerless_numeric(self, tmp_path):
        path = write(tmp_path, "c.csv", "1,0\n0,1\n")
        loaded = load_matrix(path, "covariance")
        assert loaded.names is None
        assert np.array_equal(loaded.values, np.eye(2))

    def test_blank_lines_skipped(self, tmp_path):
        path = write(tmp_path, "c.csv", "\n1,0\n\n0,1\n\n")
        loaded = load_matrix(path, "covariance")
        assert loaded.values.shape == (2, 2)

    def test_data_kind_rectangular(self, tmp_path):
        path = write(tmp_path, "d.csv", "x,y,z\n1,2,3\n4,5,6\n")
        loaded = load_matrix(path, "data")
        assert loaded.kind == "data"
        assert loaded.values.shape == (2, 3)
        assert loaded.n_cols == 3

    def test_small_asymmetry_is_symmetrized(self, tmp_path):
        path = write(tmp_path, "c.csv", "1.0,0.5000001\n0.5,1.0\n")
        loaded = load_matrix(path, "covariance")
        assert loaded.values[0, 1] == loaded.values[1, 0]
        assert loaded.values[0, 1] == pytest.approx(0.50000005, abs=1e-12)

    def test_large_asymmetry_rejected(self, tmp_path):
        path = write(tmp_path, "c.csv", "1.0,0.9\n0.5,1.0\n")
        with pytest.raises(AsymmetricInput):
            load_matrix(path, "covariance")

    def test_nonsquare_covariance_rejected(self, tmp_path):
        path = write(tmp_path, "c.csv", "1,0,0\n0,1,0\n")
        with pytest.raises(ParseError):
            load_matrix(path, "covariance")

    def test_ragged_rows_report_position(self, tmp_path):
        path = write(tmp_path, "c.csv", "1,0\n0\n")
        with pytest.raises(RaggedRows, match="row 2"):
            load_matrix(path, "covariance")

    def test_bad_cell_reports_position(self, tmp_path):
        path = write(tmp_path, "c.csv", "1,0\n0,oops\n")
        with pytest.raises(ParseError, match="row 2, column 2"):
            load_matrix(path, "covariance")

    def test_header_row_then_bad_cell_counts_file_lines(self, tmp_path):
        path = write(tmp_path, "c.csv", "a,b\n1,0\n0,x\n")
        with pytest.raises(ParseError, match="row 3, column 2"):
            load_matrix(path, "covariance")

    def test_empty_and_header_only_rejected(self, tmp_path):
        with pytest.raises(ParseError):
            load_matrix(write(tmp_path, "e.csv", ""), "covariance")
        with pytest.raises(ParseError):
            load_matrix(write(tmp_path, "h.csv", "a,b\n"), "covariance")

    def test_missing_file_is_oserror(self, tmp_path):
        with pytest.raises(OSError):
            load_matrix(str(tmp_path / "nope.csv"), "covariance")


class TestMatrixFromValues:
    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            matrix_from_values(np.eye(2), "cov")

    def test_nonfinite_rejected(self):
        with pytest.raises(ParseError):
            matrix_from_values([[1.0, np.nan], [np.nan, 1.0]], "covariance")

    def test_name_length_mismatch(self):
        with pytest.raises(ParseError):
            matrix_from_values(np.eye(2), "covariance", names=["a"])


class TestSampleCovariance:
    def test_two_by_two_hand_computed(self):
        D = np.array([[0.0, 0.0], [2.0, 4.0]])
        assert np.allclose(
            sample_covariance(D), [[2.0, 4.0], [4.0, 8.0]], atol=1e-12
        )

    def test_matches_two_pass_reference(self):
        rng = np.random.default_rng(30)
        for _ in range(10):
            D = rng.standard_normal((12, 5))
            got = sample_covariance(D)
            ref = two_pass_covariance(D)
            assert np.abs(got - ref).max() <= 1e-12

    def test_accepts_loaded_matrix(self):
        loaded = LoadedMatrix(
            values=np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 0.0]]),
            names=None,
            kind="data",
        )
        assert sample_covariance(loaded).shape == (2, 2)

    def test_too_few_rows(self):
        with pytest.raises(TooFewRows):
            sample_covariance(np.array([[1.0, 2.0]]))


class TestLogReturns:
    def test_doubling_prices(self):
        prices = np.array([[1.0, 2.0], [2.0, 4.0], [4.0, 8.0]])
        out = log_returns(prices)
        assert out.kind == "data"
        assert out.values.shape == (2, 2)
        assert np.allclose(out.values, np.log(2.0))

    def test_rejects_nonpositive_price(self):
        with pytest.raises(NonPositivePrice, match="row 2, column 1"):
            log_returns(np.array([[1.0], [0.0], [2.0]]))

    def test_too_few_rows(self):
        with pytest.raises(TooFewRows):
            log_returns(np.array([[1.0, 2.0]]))

    def test_names_carried_through(self):
        loaded = LoadedMatrix(
            values=np.array([[1.0], [2.0]]), names=["p"], kind="data"
        )
        assert log_returns(loaded).names == ["p"]


class TestSanitize:
    def test_numpy_scalars_and_arrays(self):
        out = sanitize(
            {"a": np.int64(3), "b": np.float64(1.5), "c": np.arange(2)}
        )
        assert out == {"a": 3, "b": 1.5, "c": [0, 1]}
        assert type(out["a"]) is int
        assert type(out["b"]) is float

    def test_nonfinite_become_none(self):
        out = sanitize([np.nan, np.inf, -np.inf, 1.0])
        assert out == [None, None, None, 1.0]

    def test_nested_tuples(self):
        assert sanitize({"p": ((1.0, 2.0), (3.0, 4.0))}) == {
            "p": [[1.0, 2.0], [3.0, 4.0]]
        }


class TestCanonicalJson:
    def test_sorted_minimal_newline(self):
        text = canonical_json({"b": 1, "a": [1.5, None]})
        assert text == '{"a":[1.5,null],"b":1}\n'

    def test_key_order_independent(self):
        a = canonical_json({"x": 1, "y": 2})
        b = canonical_json({"y": 2, "x": 1})
        assert a == b

    def test_nan_round_trips_as_null(self):
        text = canonical_json({"v": float("nan")})
        assert json.loads(text) == {"v": None}


class TestAtomicWrite:
    def test_writes_and_overwrites(self, tmp_path):
        path = str(tmp_path / "out.json")
        atomic_write_text(path, "one\n")
        atomic_write_text(path, "two\n")
        with open(path) as fh:
            assert fh.read() == "two\n"
        leftovers = [f for f in os.listdir(tmp_path) if f.endswith(".tmp")]
        assert leftovers == []


class TestRowsToCsv:
    def test_header_and_missing_fields(self):
        text = rows_to_csv(
            [{"k": 1, "v": 2.5}, {"k": 2}], fieldnames=["k", "v"]
        )
        assert text == "k,v\n1,2.5\n2,\n"
