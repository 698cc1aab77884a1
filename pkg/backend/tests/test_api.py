from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from app.main import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    assert client.get("/health").json() == {"status": "healthy"}
    assert "running" in client.get("/").json()["message"]


def test_count_endpoint(client):
    response = client.post("/api/v1/maps/count", json={"theta": "(1 2 3 4)"})
    assert response.status_code == 200
    body = response.json()
    assert body["planar"] == 2
    assert body["genus_histogram"] == {"0": 2, "1": 1}


def test_count_parse_error(client):
    response = client.post("/api/v1/maps/count", json={"theta": "(1 2"})
    assert response.status_code == 400
    assert "column" in response.json()["detail"]


def test_count_cap(client):
    theta = "(" + " ".join(str(i) for i in range(1, 15)) + ")"
    assert client.post("/api/v1/maps/count", json={"theta": theta}).status_code == 413


def test_table_endpoint(client):
    response = client.post("/api/v1/maps/table", json={"shape": [2], "max_orders": [3]})
    assert response.status_code == 200
    assert [row["planar"] for row in response.json()] == [1, 2, 8]


def test_table_validation(client):
    response = client.post("/api/v1/maps/table", json={"shape": [2, 2], "max_orders": [3]})
    assert response.status_code == 422


def test_verify_endpoint(client):
    response = client.post("/api/v1/verify/main", json={"theta": "(1 2)(3 4)"})
    assert response.status_code == 200
    body = response.json()
    assert body["passed"]
    assert body["reports"][0]["details"]["lhs_count"] == 2


def test_verify_lists_checks(client):
    assert "exact-and-scary" in client.get("/api/v1/verify/").json()["checks"]


def test_verify_unknown_check(client):
    assert client.post("/api/v1/verify/nonsense", json={}).status_code == 400


def test_montecarlo_endpoint(client):
    payload = {"theta": "(1 2)", "grid": [4], "samples": 50, "seed": 1}
    response = client.post("/api/v1/montecarlo", json=payload)
    assert response.status_code == 200
    assert response.json()["target"] == 1
    assert client.post("/api/v1/montecarlo", json=payload).json() == response.json()


def test_montecarlo_validation(client):
    response = client.post("/api/v1/montecarlo", json={"theta": "(1 2)", "samples": 0})
    assert response.status_code == 422


def test_routes_share_one_set_of_services():
    """Every provider hands out the services owned by the single verify service"""
    from app.api import deps
    from app.services import (
        arboreal_service,
        freewick_service,
        gausscumulant_service,
        guemc_service,
        mapcount_service,
        splicing_service,
        verify_service,
    )

    verify = deps.get_verify_service()
    assert deps.get_verify_service() is verify
    assert deps.get_mapcount_service() is verify.mapcount_service
    assert deps.get_guemc_service() is verify.guemc_service
    modules = (
        arboreal_service, freewick_service, gausscumulant_service, guemc_service, mapcount_service, splicing_service,
        verify_service,
    )
    for module in modules:
        assert not [name for name in vars(module) if name.startswith("get_") and name.endswith("_service")]


def test_package_uses_absolute_imports():
    app_dir = Path(__file__).resolve().parents[1] / "app"
    relative = [
        f"{path.relative_to(app_dir)}:{number}"
        for path in app_dir.rglob("*.py")
        for number, line in enumerate(path.read_text().splitlines(), start=1)
        if line.lstrip().startswith("from .")
    ]
    assert not relative
