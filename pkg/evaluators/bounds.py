from typing import Any, Dict, Optional

import settings
from errors import ConfigurationError
from experiments.reports import SolveReport
from logger import LOGGER

# relative slack on kappa <= C * lambda_TOL and absolute slack on lambda_min >= 1
KAPPA_SLACK = 1e-8
LAMBDA_MIN_SLACK = 1e-6


class BoundEvaluator:
    """Audits solve reports against kappa <= C * lambda_TOL and lambda_min >= 1"""

    name = "bounds"

    def __init__(self, db_manager=None):
        self._db_manager = db_manager

    @property
    def db_manager(self):
        if self._db_manager is None:
            from database.models import get_db_manager

            self._db_manager = get_db_manager()
        if self._db_manager is None:
            raise ConfigurationError("No results database configured (set BDDC_DATABASE_URL or pass --db)")
        return self._db_manager

    def evaluate_report(self, report: SolveReport) -> Dict[str, Any]:
        adaptive = report.method != 0
        kappa_ok = True
        if report.bound_value is not None:
            kappa_ok = report.kappa <= report.bound_value * (1 + KAPPA_SLACK)
        lambda_min_ok = report.lambda_min >= 1 - LAMBDA_MIN_SLACK if adaptive else True

        hard = report.method in (1, 2, 3)
        if report.method == 4:
            hard = report.gram_condition is None or report.gram_condition <= settings.GRAM_COND_WARN

        if not adaptive:
            message = "No tolerance for method0; nothing to bound"
        elif kappa_ok and lambda_min_ok:
            message = f"kappa {report.kappa:.4g} <= {report.bound_value:.4g}, lambda_min {report.lambda_min:.6g}"
        else:
            message = f"Bound violated: kappa {report.kappa:.4g} (bound {report.bound_value}), lambda_min {report.lambda_min:.6g}"

        audit = {
            "evaluator": self.name,
            "kappa_ok": bool(kappa_ok),
            "lambda_min_ok": bool(lambda_min_ok),
            "hard": bool(hard),
            "message": message,
        }
        if not (kappa_ok and lambda_min_ok):
            LOGGER.warning(f"{message} ({'hard' if hard else 'soft'} check)")
        return audit

    def evaluate_run(self, run_id: int) -> Optional[Dict[str, Any]]:
        """Audit a stored run; None when it does not exist or was already audited"""
        data = self.db_manager.get_run_with_classes(run_id)
        if not data:
            LOGGER.warning(f"No run found with id {run_id}")
            return None
        if data["audits"]:
            LOGGER.info(f"Run {run_id} already audited, skipping")
            return None

        audit = self.evaluate_report(SolveReport.from_dict(data))
        audit["id"] = self.db_manager.create_audit(run_id, audit)
        return audit

    def batch_evaluate_unevaluated(self, limit: int = 50) -> Dict[str, Any]:
        run_ids = self.db_manager.get_unaudited_run_ids(limit)

        if not run_ids:
            return {"status": "completed", "message": "No unaudited runs found", "evaluated_count": 0, "failed_count": 0}

        LOGGER.info(f"Starting audit of {len(run_ids)} runs")
        evaluated_count = failed_count = violations = 0
        for run_id in run_ids:
            try:
                audit = self.evaluate_run(run_id)
            except Exception as e:
                LOGGER.error(f"Failed to audit run {run_id}: {e}")
                failed_count += 1
                continue
            if audit is None:
                failed_count += 1
                continue
            evaluated_count += 1
            if not (audit["kappa_ok"] and audit["lambda_min_ok"]):
                violations += 1

        result = {
            "status": "completed",
            "message": f"Audit completed: {evaluated_count} successful, {failed_count} failed, {violations} violations",
            "evaluated_count": evaluated_count,
            "failed_count": failed_count,
            "violations": violations,
            "total_processed": len(run_ids),
        }
        LOGGER.info(result["message"])
        return result
