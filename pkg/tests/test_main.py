import csv
import json

from main import main


def test_run_writes_a_csv_report(tmp_path):
    out = tmp_path / "report.csv"
    assert main(["run", "--dim", "2", "--n", "2", "--hh", "4", "--method", "2", "--out", str(out)]) == 0
    rows = list(csv.reader(out.read_text().splitlines()))
    assert rows[0][:5] == ["method", "pnum1", "pnum2", "pnumE", "iter"]
    assert rows[1][0] == "2"


def test_run_prints_json_and_stores_the_run(tmp_path, capsys):
    db = f"sqlite:///{tmp_path / 'runs.db'}"
    args = ["run", "--dim", "2", "--n", "2", "--hh", "3", "--method", "3", "--format", "json", "--db", db, "--check-direct"]
    assert main(args) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["method"] == 3
    assert report["direct_error"] < 1e-6

    assert main(["audit", "--db", db]) == 0
    assert json.loads(capsys.readouterr().out)["evaluated_count"] == 0


def test_spectra_command(tmp_path):
    out = tmp_path / "spectra.csv"
    assert main(["spectra", "--dim", "2", "--n", "2", "--hh", "4", "--method", "2", "--eta", "both", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 1 + 2 * 4


def test_configuration_errors_exit_with_one():
    assert main(["run", "--dim", "2", "--n", "2", "--hh", "4", "--method", "2", "--coeff", "marble"]) == 1
    assert main(["run", "--dim", "2", "--n", "1", "--hh", "4", "--method", "0"]) == 1
    assert main(["audit"]) == 1


def test_bound_violation_exits_with_two(monkeypatch):
    from evaluators.bounds import BoundEvaluator

    def failing(self, report):
        return {"evaluator": "bounds", "kappa_ok": False, "lambda_min_ok": True, "hard": True, "message": "forced"}

    monkeypatch.setattr(BoundEvaluator, "evaluate_report", failing)
    assert main(["run", "--dim", "2", "--n", "2", "--hh", "2", "--method", "2"]) == 2
