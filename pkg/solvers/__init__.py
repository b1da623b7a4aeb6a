from typing import Optional

from coarse.space import AdaptiveCoarseSpace
from errors import ConfigurationError
from scaling.scalings import ScalingSet
from solvers.base import ContextAwareSolver, InterfaceProblem, SolveOutcome
from solvers.bddc import BDDCSolver
from solvers.fetidp import FETIDPSolver


def get_solver(
    method: int, problem: InterfaceProblem, scalings: ScalingSet, coarse_space: Optional[AdaptiveCoarseSpace] = None
) -> ContextAwareSolver:
    if method in [0, 1, 2, 3]:
        return BDDCSolver(problem, scalings, coarse_space)

    elif method in [4]:
        constraints = coarse_space.constraints if coarse_space is not None else None
        return FETIDPSolver(problem, scalings, constraints)

    raise ConfigurationError(f"Unsupported method: {method}")


__all__ = ["BDDCSolver", "ContextAwareSolver", "FETIDPSolver", "InterfaceProblem", "SolveOutcome", "get_solver"]
