"""Tests for the Flask JSON API."""

import pytest
from unittest.mock import patch

import app as api


@pytest.fixture
def client():
    api.app.config["TESTING"] = True
    with api.app.test_client() as client:
        yield client


class TestHealthAndSchemes:
    """Test the informational endpoints."""

    def test_health(self, client):
        """Test the health check."""
        response = client.get("/health")
        assert response.status_code == 200
        assert response.get_json() == {"status": "healthy"}

    def test_schemes_grouped_by_family(self, client):
        """Test that schemes are grouped by message family."""
        response = client.get("/api/schemes")
        assert response.status_code == 200
        assert response.get_json()["schemes"] == {"qudit": ["weyl"], "qubit": ["pauli"]}

    def test_security_headers(self, client):
        """Test that security headers are set on every response."""
        response = client.get("/health")
        assert response.headers["X-Content-Type-Options"] == "nosniff"
        assert response.headers["X-Frame-Options"] == "DENY"

    def test_unknown_endpoint(self, client):
        """Test the JSON 404 handler."""
        response = client.get("/api/nothing")
        assert response.status_code == 404
        assert "error" in response.get_json()

    def test_wrong_method(self, client):
        """Test the JSON 405 handler."""
        response = client.get("/api/analyze")
        assert response.status_code == 405


class TestBasisEndpoint:
    """Test POST /api/basis."""

    def test_bell_basis(self, client):
        """Test ell = p = 1."""
        response = client.post("/api/basis", json={"ell": 1, "p": 1})
        assert response.status_code == 200
        assert response.get_json()["completeness_residual"] < 1e-12

    def test_complex_strings_and_pairs(self, client):
        """Test "re+imi" strings and [re, im] pairs."""
        response = client.post("/api/basis", json={"ell": "0.3+0.4i", "p": [0.1, -0.2]})
        assert response.status_code == 200
        assert response.get_json()["ell"] == pytest.approx([0.3, 0.4])

    def test_missing_field(self, client):
        """Test that ell and p are required."""
        response = client.post("/api/basis", json={"ell": 1})
        assert response.status_code == 400
        assert "p" in response.get_json()["error"]


class TestAnalyzeEndpoint:
    """Test POST /api/analyze."""

    def test_qubit_bound(self, client):
        """Test (0.8, 0.2) gives bound 0.4 and no simulation."""
        response = client.post("/api/analyze", json={"d": 2, "spectrum": [0.8, 0.2]})
        assert response.status_code == 200
        data = response.get_json()
        assert data["paper_bound"] == pytest.approx(0.4, abs=1e-12)
        assert data["simulation"] is None

    def test_me_flag(self, client):
        """Test the maximally entangled shortcut."""
        response = client.post("/api/analyze", json={"d": 2, "D": 4, "me": True})
        assert response.status_code == 200
        assert response.get_json()["achievable_gamma"] == pytest.approx(0.5)

    def test_oversized_resource_rejected_before_allocation(self, client):
        """Test that "me" with a huge D is a 400 and builds no spectrum."""
        with patch.object(api.SchmidtState, "uniform") as uniform:
            response = client.post("/api/analyze", json={"d": 2, "D": 10**9, "me": True})
        assert response.status_code == 400
        assert "Resource dimension" in response.get_json()["error"]
        uniform.assert_not_called()

    def test_spectrum_string(self, client):
        """Test a comma-separated spectrum string."""
        response = client.post("/api/analyze", json={"spectrum": "0.5,0.5"})
        assert response.status_code == 200

    @pytest.mark.parametrize(
        "body",
        [
            {"d": 2, "spectrum": [0.5, 0.4]},
            {"d": 2, "spectrum": [1.2, -0.2]},
            {"d": 2, "spectrum": "abc"},
            {"d": 3, "spectrum": [0.5, 0.5]},
            {"d": 2, "spectrum": [0.5, 0.5], "scheme": "bb84"},
            {"d": "two", "spectrum": [0.5, 0.5]},
            {"d": 2},
        ],
    )
    def test_validation_errors(self, client, body):
        """Test that invalid parameters return 400 with a message."""
        response = client.post("/api/analyze", json=body)
        assert response.status_code == 400
        assert response.get_json()["error"]

    def test_no_data(self, client):
        """Test that an empty body is rejected."""
        response = client.post("/api/analyze", data="", content_type="application/json")
        assert response.status_code == 400

    def test_unexpected_error_is_sanitized(self, client):
        """Test that internal failures return 500 without details."""
        with patch.object(api.calculator, "analyze", side_effect=RuntimeError("secret detail")):
            response = client.post("/api/analyze", json={"spectrum": [0.5, 0.5]})
        assert response.status_code == 500
        assert "secret" not in response.get_json()["error"]


class TestSimulateEndpoint:
    """Test POST /api/simulate."""

    def test_seeded_run(self, client):
        """Test that the response carries reproducible simulation stats."""
        body = {"d": 2, "spectrum": [0.8, 0.2], "trials": 20000, "seed": 5}
        first = client.post("/api/simulate", json=body).get_json()
        second = client.post("/api/simulate", json=body).get_json()
        assert first["simulation"]["trials"] == 20000
        assert first["simulation"]["misdecoded"] == 0
        assert first == second

    def test_trial_cap(self, client):
        """Test that oversized runs are refused."""
        response = client.post("/api/simulate", json={"spectrum": [0.5, 0.5], "trials": 10**7})
        assert response.status_code == 400
        assert "Maximum" in response.get_json()["error"]

    def test_zero_trials(self, client):
        """Test that simulate needs at least one trial."""
        response = client.post("/api/simulate", json={"spectrum": [0.5, 0.5], "trials": 0})
        assert response.status_code == 400
