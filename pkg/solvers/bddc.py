"""BDDC with a change of basis: M^{-1} = R~^T D~ S~^{-1} D~^T R~ on the transformed interface"""

from typing import Optional

import numpy as np

from coarse.space import AdaptiveCoarseSpace
from scaling.scalings import ScalingSet
from solvers.base import ContextAwareSolver, InterfaceProblem
from solvers.partially_coupled import PartiallyCoupledSpace


def assemble_partially_coupled(
    problem: InterfaceProblem, scalings: ScalingSet, coarse_space: Optional[AdaptiveCoarseSpace] = None
) -> PartiallyCoupledSpace:
    bases = coarse_space.bases if coarse_space is not None else None
    return PartiallyCoupledSpace(problem.classes, problem.maps, problem.schurs, scalings, bases)


def bddc_apply(space: PartiallyCoupledSpace, r: np.ndarray) -> np.ndarray:
    return space.gather_scaled(space.solve(space.distribute_scaled(r)))


def interface_operator_apply(problem: InterfaceProblem, w: np.ndarray) -> np.ndarray:
    """S^ w on the assembled interface, original coordinates"""
    return problem.interface_apply(w)


def averaging_energy_ratio(space: PartiallyCoupledSpace, w: np.ndarray) -> float:
    """<S~ (I - E_D) w, (I - E_D) w> / <S~ w, w>"""
    jump = w - space.average(w)
    return space.energy(jump) / space.energy(w)


def sample_averaging_bound(space: PartiallyCoupledSpace, samples: int = 50, seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    return max(averaging_energy_ratio(space, rng.standard_normal(space.size)) for _ in range(samples))


class BDDCSolver(ContextAwareSolver):
    name = "BDDC"

    def __init__(self, problem: InterfaceProblem, scalings: ScalingSet, coarse_space: Optional[AdaptiveCoarseSpace] = None):
        self.problem = problem
        self.scalings = scalings
        self.coarse_space = coarse_space
        self.space: Optional[PartiallyCoupledSpace] = None

    def setup(self) -> None:
        self.space = assemble_partially_coupled(self.problem, self.scalings, self.coarse_space)

    @property
    def size(self) -> int:
        return self.problem.maps.num_interface

    def operator_apply(self, x: np.ndarray) -> np.ndarray:
        return self.space.interface_apply(x)

    def preconditioner_apply(self, r: np.ndarray) -> np.ndarray:
        return bddc_apply(self.space, r)

    def iteration_rhs(self) -> np.ndarray:
        return self.space.transpose_transform(self.problem.rhs)

    def recover_interface(self, x: np.ndarray) -> np.ndarray:
        return self.space.from_transformed(x)

    def diagnostics(self) -> dict:
        return {"primal_total": self.space.n_primal}
