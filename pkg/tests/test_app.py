import time

import pytest

import app as app_module
from app import create_app
from experiments.reports import SolveReport


@pytest.fixture
def client(db_manager):
    db_manager.create_run(
        SolveReport(method=3, dim=2, N=3, m=4, coefficient="constant", scaling="deluxe", kappa=1.2, bound_value=300.0, run_id="a")
    )
    db_manager.create_run(SolveReport(method=0, dim=2, N=3, m=4, coefficient="constant", scaling="multiplicity", run_id="b"))
    return create_app(db_manager).test_client()


def test_health(client):
    response = client.get("/api/health")
    assert response.status_code == 200
    assert response.get_json() == {"status": "healthy", "database": True}


def test_methods(client):
    methods = client.get("/api/methods").get_json()["methods"]
    assert [m["number"] for m in methods] == [0, 1, 2, 3, 4]
    assert methods[4]["solver"] == "fetidp"


def test_runs(client):
    runs = client.get("/api/runs").get_json()
    assert {r["run_id"] for r in runs} == {"a", "b"}
    assert [r["run_id"] for r in client.get("/api/runs?method=3").get_json()] == ["a"]
    assert client.get("/api/runs?method=9").status_code == 400


def test_run_detail(client):
    run_id = client.get("/api/runs?method=3").get_json()[0]["id"]
    detail = client.get(f"/api/runs/{run_id}").get_json()
    assert detail["kappa"] == 1.2
    assert detail["audits"] == []
    assert client.get("/api/runs/999").status_code == 404


def test_dashboard_stats(client):
    stats = client.get("/api/dashboard/stats").get_json()
    assert stats["totalRuns"] == 2
    assert set(stats["methods"]) == {"0", "3"}


def test_background_audit(client, db_manager):
    response = client.post("/api/audits/run", json={"limit": 10})
    assert response.get_json()["status"] == "audit_started"
    for _ in range(100):
        if not db_manager.get_unaudited_run_ids():
            break
        time.sleep(0.05)
    assert db_manager.get_unaudited_run_ids() == []


def test_no_database_is_service_unavailable():
    client = create_app().test_client()
    assert client.get("/api/health").get_json()["database"] is False
    assert client.get("/api/runs").status_code == 503
    assert client.get("/api/dashboard/stats").status_code == 503
    assert client.post("/api/audits/run").status_code == 503


def test_module_level_app():
    assert app_module.app.name == "app"
