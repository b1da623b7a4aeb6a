import pytest

from database.models import DatabaseManager, get_db_manager
from experiments.reports import SolveReport


def _report(run_id, method=3, kappa=2.0, converged=True):
    return SolveReport(
        method=method,
        dim=2,
        N=3,
        m=4,
        coefficient="channels:3:1e6",
        scaling="deluxe",
        tol_face=2.4,
        pnum2=5,
        iterations=6,
        converged=converged,
        lambda_min=1.0,
        lambda_max=kappa,
        kappa=kappa,
        residuals=[1.0, 1e-3, 1e-11],
        stages={"schur": 0.1},
        warnings=["w"],
        class_selections=[
            {"class_id": 4, "kind": "face", "multiplicity": 2, "problem": "face", "dofs": 3, "selected": 2, "infinite": 1, "tolerance": 2.4},
            {"class_id": 1, "kind": "face", "multiplicity": 2, "problem": "face", "dofs": 3, "selected": 0, "infinite": 0, "tolerance": 2.4},
        ],
        run_id=run_id,
    )


def test_create_and_fetch_run(db_manager):
    record_id = db_manager.create_run(_report("run-a"))
    data = db_manager.get_run_with_classes(record_id)
    assert data["run_id"] == "run-a"
    assert data["coefficient"] == "channels:3:1e6"
    assert data["residuals"] == [1.0, 1e-3, 1e-11]
    assert data["stages"] == {"schur": 0.1}
    assert [s["class_id"] for s in data["class_selections"]] == [1, 4]
    assert data["class_selections"][1]["selected"] == 2
    assert data["audits"] == []
    assert data["has_audits"] is False
    assert db_manager.get_run_with_classes(9999) is None


def test_get_runs_filters_by_method(db_manager):
    db_manager.create_run(_report("run-a", method=2))
    db_manager.create_run(_report("run-b", method=3))
    db_manager.create_run(_report("run-c", method=3))
    assert len(db_manager.get_runs()) == 3
    assert {r["run_id"] for r in db_manager.get_runs(method=3)} == {"run-b", "run-c"}
    assert len(db_manager.get_runs(limit=1)) == 1
    assert "class_selections" not in db_manager.get_runs()[0]


def test_audits_and_unaudited_runs(db_manager):
    first = db_manager.create_run(_report("run-a"))
    second = db_manager.create_run(_report("run-b"))
    assert set(db_manager.get_unaudited_run_ids()) == {first, second}

    audit_id = db_manager.create_audit(first, {"evaluator": "bounds", "kappa_ok": True, "lambda_min_ok": False, "message": "x"})
    assert audit_id is not None
    assert db_manager.get_unaudited_run_ids() == [second]

    (audit,) = db_manager.get_run_with_classes(first)["audits"]
    assert audit["passed"] is False
    assert audit["hard"] is True
    assert audit["timestamp"] is not None


def test_dashboard_stats(db_manager):
    assert db_manager.get_dashboard_stats()["totalRuns"] == 0

    a = db_manager.create_run(_report("run-a", method=2, kappa=2.0))
    db_manager.create_run(_report("run-b", method=2, kappa=4.0, converged=False))
    db_manager.create_run(_report("run-c", method=0, kappa=100.0))
    db_manager.create_audit(a, {"kappa_ok": True, "lambda_min_ok": True})

    stats = db_manager.get_dashboard_stats()
    assert stats["totalRuns"] == 3
    assert stats["convergedRuns"] == 2
    assert stats["totalAudits"] == 1
    assert stats["auditPassRate"] == 100.0
    assert stats["methods"]["2"]["runs"] == 2
    assert stats["methods"]["2"]["avg_kappa"] == pytest.approx(3.0)
    assert stats["methods"]["2"]["max_kappa"] == pytest.approx(4.0)
    assert stats["methods"]["0"]["avg_iterations"] == 6


def test_file_database(tmp_path):
    url = f"sqlite:///{tmp_path / 'runs.db'}"
    DatabaseManager(url).create_run(_report("run-a"))
    assert DatabaseManager(url).get_runs()[0]["run_id"] == "run-a"


def test_get_db_manager(tmp_path):
    assert get_db_manager() is None
    url = f"sqlite:///{tmp_path / 'shared.db'}"
    assert get_db_manager(url) is get_db_manager(url)
