import pytest

import settings
from errors import ConfigurationError
from evaluators.bounds import BoundEvaluator
from experiments.reports import SolveReport


def _report(method=3, kappa=2.0, lambda_min=1.0, bound_value=300.0, gram_condition=None, run_id="run"):
    return SolveReport(
        method=method,
        dim=2,
        N=3,
        m=4,
        coefficient="constant",
        scaling="deluxe",
        tol_face=None if method == 0 else 2.4,
        kappa=kappa,
        lambda_min=lambda_min,
        lambda_max=kappa * lambda_min,
        bound_value=None if method == 0 else bound_value,
        gram_condition=gram_condition,
        run_id=run_id,
    )


def test_passing_report():
    audit = BoundEvaluator().evaluate_report(_report())
    assert audit == {"evaluator": "bounds", "kappa_ok": True, "lambda_min_ok": True, "hard": True, "message": audit["message"]}


def test_kappa_above_the_bound_is_a_hard_failure():
    audit = BoundEvaluator().evaluate_report(_report(kappa=301.0))
    assert not audit["kappa_ok"]
    assert audit["hard"]
    assert "violated" in audit["message"]


def test_lambda_min_below_one_fails():
    assert not BoundEvaluator().evaluate_report(_report(lambda_min=0.99))["lambda_min_ok"]
    assert BoundEvaluator().evaluate_report(_report(lambda_min=1 - 1e-9))["lambda_min_ok"]


def test_vertex_only_method_is_never_bounded():
    audit = BoundEvaluator().evaluate_report(_report(method=0, kappa=1e6, lambda_min=0.5))
    assert audit["kappa_ok"] and audit["lambda_min_ok"]
    assert not audit["hard"]


def test_fetidp_check_softens_with_an_ill_conditioned_gram_matrix():
    assert BoundEvaluator().evaluate_report(_report(method=4, gram_condition=10.0))["hard"]
    assert not BoundEvaluator().evaluate_report(_report(method=4, gram_condition=settings.GRAM_COND_WARN * 10))["hard"]


def test_stored_runs_are_audited_once(db_manager):
    good = db_manager.create_run(_report(run_id="good"))
    bad = db_manager.create_run(_report(kappa=1e4, run_id="bad"))
    evaluator = BoundEvaluator(db_manager)

    audit = evaluator.evaluate_run(good)
    assert audit["kappa_ok"] and audit["id"] is not None
    assert evaluator.evaluate_run(good) is None
    assert evaluator.evaluate_run(12345) is None

    result = evaluator.batch_evaluate_unevaluated()
    assert result["evaluated_count"] == 1
    assert result["violations"] == 1
    assert db_manager.get_run_with_classes(bad)["audits"][0]["kappa_ok"] is False
    assert evaluator.batch_evaluate_unevaluated()["evaluated_count"] == 0


def test_missing_database_is_a_configuration_error():
    with pytest.raises(ConfigurationError):
        BoundEvaluator().evaluate_run(1)
