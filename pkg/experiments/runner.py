import time
from typing import Optional

import numpy as np

from context.manager import ContextManager
from evaluators.bounds import BoundEvaluator
from experiments.bounds import bound_constant, bound_value
from experiments.config import ExperimentConfig
from experiments.pipeline import build_coarse_space, build_problem, build_scalings, direct_interface_solution
from experiments.reports import SolveReport
from logger import LOGGER
from schur.slab import parse_eta
from solvers import get_solver


def run_experiment(config: ExperimentConfig, db_manager=None, evaluator: Optional[BoundEvaluator] = None) -> SolveReport:
    """Build the problem, the coarse space and the solver for one method and solve with f = 1"""
    ContextManager.start_run(config.summary())
    start = time.perf_counter()
    try:
        config.check_consistency()
        problem = build_problem(config)
        coarse_space = build_coarse_space(problem, config)
        with ContextManager.record_stage("scalings"):
            scalings = build_scalings(problem, config.scaling_kind, parse_eta(config.eta, problem.mesh))

        solver = get_solver(config.method, problem, scalings, coarse_space).build()
        outcome = solver.solve(rtol=config.rtol, maxit=config.maxit)
        krylov, constraints = outcome.krylov, coarse_space.constraints

        report = SolveReport(
            method=config.method,
            dim=config.dim,
            N=config.N,
            m=config.m,
            coefficient=config.coeff,
            scaling=config.scaling_kind,
            eta=str(config.eta),
            tol_face=config.tol_face_value,
            tol_edge=config.tol_edge_value if config.dim == 3 else None,
            pnum1=constraints.pnum1,
            pnum2=constraints.pnum2,
            pnumE=constraints.pnumE,
            p1=constraints.p1,
            p2=constraints.p2,
            pE=constraints.pE,
            primal_total=int(outcome.diagnostics.get("primal_total", 0)),
            iterations=krylov.iterations,
            converged=krylov.converged,
            lambda_min=krylov.lambda_min,
            lambda_max=krylov.lambda_max,
            kappa=krylov.kappa,
            residuals=list(krylov.residuals),
            bound_constant=bound_constant(problem.classes),
            bound_value=bound_value(problem.classes, config.tolerance),
            gram_condition=outcome.diagnostics.get("gram_condition"),
            diagnostics=dict(outcome.diagnostics),
        )

        if config.check_direct:
            with ContextManager.record_stage("direct solve"):
                reference = direct_interface_solution(problem)
            report.direct_error = float(np.linalg.norm(outcome.interface_solution - reference) / np.linalg.norm(reference))
            LOGGER.info(f"Relative interface error against the direct solve: {report.direct_error:.3e}")

        audit = (evaluator or BoundEvaluator()).evaluate_report(report)
        report.bound_ok = audit["kappa_ok"] and audit["lambda_min_ok"]
        report.time = time.perf_counter() - start
    except Exception:
        ContextManager.reset()
        raise

    if db_manager is None:
        from database.models import get_db_manager

        db_manager = get_db_manager()
    record_id = ContextManager.finalize_run(report, db_manager)
    if record_id is not None:
        db_manager.create_audit(record_id, audit)
    return report
