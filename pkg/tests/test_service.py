"""HTTP service endpoints: status codes, payload validation, schemas."""

import pytest
from fastapi.testclient import TestClient

from sparsepca.service import app

client = TestClient(app)

DIAG = {"values": [[3.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 1.0]]}


class TestHealth:
    def test_healthz(self):
        resp = client.get("/healthz")
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok"}


class TestSolve:
    def test_greedy_by_cardinality(self):
        resp = client.post(
            "/solve", json={"matrix": DIAG, "method": "greedy", "k": 2}
        )
        assert resp.status_code == 200
        body = resp.json()
        comp = body["components"][0]
        assert comp["support"] == [1, 2]
        assert comp["variance"] == pytest.approx(3.0, abs=1e-9)
        assert body["method"] == "greedy"
        assert "rows" not in body

    def test_dspca_bounds(self):
        resp = client.post(
            "/solve",
            json={
                "matrix": DIAG,
                "method": "dspca",
                "rho": 0.5,
                "epsilon": 1e-4,
            },
        )
        assert resp.status_code == 200
        bounds = resp.json()["bounds"]
        assert bounds["converged"] is True
        assert bounds["gap"] <= 1e-4

    def test_names_flow_through(self):
        payload = dict(DIAG, names=["x", "y", "z"])
        resp = client.post(
            "/solve", json={"matrix": payload, "method": "greedy", "k": 1}
        )
        assert resp.status_code == 200
        assert resp.json()["components"][0]["names"] == ["x"]

    def test_data_kind(self):
        matrix = {
            "values": [[1.0, 2.0], [2.0, 1.0], [3.0, 3.0], [0.0, 1.0]],
            "kind": "data",
        }
        resp = client.post(
            "/solve", json={"matrix": matrix, "method": "greedy", "k": 1}
        )
        assert resp.status_code == 200
        assert len(resp.json()["components"][0]["support"]) == 1

    def test_unknown_method_is_422(self):
        resp = client.post(
            "/solve", json={"matrix": DIAG, "method": "magic", "k": 1}
        )
        assert resp.status_code == 422

    def test_missing_selector_is_422(self):
        resp = client.post("/solve", json={"matrix": DIAG, "method": "dspca"})
        assert resp.status_code == 422
        assert "rho" in str(resp.json()["detail"])

    def test_asymmetric_matrix_is_400(self):
        bad = {"values": [[1.0, 0.9], [0.5, 1.0]]}
        resp = client.post(
            "/solve", json={"matrix": bad, "method": "greedy", "k": 1}
        )
        assert resp.status_code == 400
        assert resp.json()["detail"]["error"] == "AsymmetricInput"

    def test_nonfinite_matrix_is_422_from_json(self):
        # bare NaN is invalid JSON; the client must reject it before
        # the endpoint ever runs
        bad = {"values": [[1.0, 0.0], [0.0, 1.0]]}
        resp = client.post(
            "/solve",
            content=b'{"matrix": {"values": [[NaN, 0.0], [0.0, 1.0]]}, "method": "greedy", "k": 1}',
            headers={"content-type": "application/json"},
        )
        assert resp.status_code in (400, 422)
        del bad


class TestPath:
    def test_rows_table(self):
        resp = client.post("/path", json={"matrix": DIAG, "method": "greedy"})
        assert resp.status_code == 200
        rows = resp.json()["rows"]
        assert len(rows) == 3
        assert rows[0]["k"] == 1
        assert rows[0]["variance"] == pytest.approx(3.0, abs=1e-9)
        assert rows[0]["support"] == "1"

    def test_k_max_respected(self):
        resp = client.post(
            "/path", json={"matrix": DIAG, "method": "threshold", "k_max": 2}
        )
        assert resp.status_code == 200
        assert len(resp.json()["rows"]) == 2

    def test_oversized_k_max_is_400(self):
        resp = client.post(
            "/path", json={"matrix": DIAG, "method": "greedy", "k_max": 9}
        )
        assert resp.status_code == 400
        assert resp.json()["detail"]["error"] == "BadCardinality"


class TestCertify:
    def test_top_axis_certifies(self):
        resp = client.post(
            "/certify", json={"matrix": DIAG, "pattern": [1]}
        )
        assert resp.status_code == 200
        bounds = resp.json()["bounds"]
        assert bounds["certified"] is True
        assert bounds["rho_star"] == pytest.approx(1.5, abs=1e-9)

    def test_out_of_interval_penalty_serializes_nan_as_null(self):
        resp = client.post(
            "/certify",
            json={"matrix": DIAG, "pattern": [1], "rho_star": 3.5},
        )
        assert resp.status_code == 200
        bounds = resp.json()["bounds"]
        assert bounds["certified"] is False
        assert bounds["eig_gap_lhs"] is None
        assert bounds["objective"] is None

    def test_empty_pattern_is_422(self):
        resp = client.post("/certify", json={"matrix": DIAG, "pattern": []})
        assert resp.status_code == 422

    def test_out_of_range_pattern_is_422(self):
        resp = client.post("/certify", json={"matrix": DIAG, "pattern": [4]})
        assert resp.status_code == 422


class TestOracle:
    def test_exhaustive_value(self):
        resp = client.post("/oracle", json={"matrix": DIAG, "k": 2})
        assert resp.status_code == 200
        body = resp.json()
        assert body["bounds"]["value"] == pytest.approx(3.0, abs=1e-9)
        assert body["components"][0]["support"] == [1, 2]

    def test_zero_k_is_422(self):
        resp = client.post("/oracle", json={"matrix": DIAG, "k": 0})
        assert resp.status_code == 422


class TestDeflate:
    def test_sequential_extraction(self):
        resp = client.post(
            "/deflate",
            json={
                "matrix": DIAG,
                "components": 2,
                "method": "greedy",
                "k": 1,
            },
        )
        assert resp.status_code == 200
        comps = resp.json()["components"]
        assert [c["support"] for c in comps] == [[1], [2]]

    def test_bad_component_count_is_422(self):
        resp = client.post(
            "/deflate",
            json={"matrix": DIAG, "components": 0, "method": "greedy", "k": 1},
        )
        assert resp.status_code == 422
