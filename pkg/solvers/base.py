from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Protocol

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from context.manager import ContextManager
from decomposition.classes import EquivalenceClass, InterfaceMaps
from grid.assembly import assemble_global, load_vector
from grid.coefficients import CoefficientField
from grid.mesh import StructuredMesh
from krylov.pcg import KrylovResult, pcg
from krylov.spectrum import explicit_spectrum
from logger import LOGGER
from schur.complements import SchurOperator


@dataclass
class InterfaceProblem:
    """Everything the interface solvers share: decomposition, Schur complements and the condensed load"""

    mesh: StructuredMesh
    coeff: CoefficientField
    classes: List[EquivalenceClass]
    maps: InterfaceMaps
    schurs: Dict[int, SchurOperator]
    rhs: np.ndarray

    def local_rhs(self, i: int) -> np.ndarray:
        return self.schurs[i].condense_rhs()

    def interface_apply(self, u: np.ndarray) -> np.ndarray:
        """S^ u = sum_i R_i^T S^(i) R_i u"""
        out = np.zeros(self.maps.num_interface)
        for i, S in self.schurs.items():
            self.maps.extend_add(i, S.apply(self.maps.restrict(i, u)), out)
        return out

    def extend(self, u_gamma: np.ndarray) -> np.ndarray:
        """Solution on the free nodes from its interface trace"""
        u = np.zeros(self.mesh.num_nodes)
        for i, S in self.schurs.items():
            u[S.system.nodes] = S.extend(self.maps.restrict(i, u_gamma))
        return u[self.mesh.free_nodes]

    def direct_solution(self) -> np.ndarray:
        A = sp.csc_matrix(assemble_global(self.mesh, self.coeff))
        return spsolve(A, load_vector(self.mesh))


def assemble_interface_rhs(maps: InterfaceMaps, schurs: Mapping[int, SchurOperator]) -> np.ndarray:
    g = np.zeros(maps.num_interface)
    for i, S in schurs.items():
        maps.extend_add(i, S.condense_rhs(), g)
    return g


@dataclass
class SolveOutcome:
    krylov: KrylovResult
    interface_solution: np.ndarray
    diagnostics: dict = field(default_factory=dict)


class InterfaceSolver(Protocol):
    name: str
    problem: InterfaceProblem

    def setup(self) -> None: ...

    @property
    def size(self) -> int: ...

    def operator_apply(self, x: np.ndarray) -> np.ndarray: ...

    def preconditioner_apply(self, r: np.ndarray) -> np.ndarray: ...

    def iteration_rhs(self) -> np.ndarray: ...

    def recover_interface(self, x: np.ndarray) -> np.ndarray: ...

    def _pcg_options(self) -> dict:
        """Extra keyword arguments for pcg (initial iterate, residual projection)"""
        return {}

    def diagnostics(self) -> dict:
        return {}

    def solve(self, rtol: Optional[float] = None, maxit: Optional[int] = None) -> SolveOutcome:
        result = pcg(self.operator_apply, self.preconditioner_apply, self.iteration_rhs(), rtol=rtol, maxit=maxit, **self._pcg_options())
        return SolveOutcome(krylov=result, interface_solution=self.recover_interface(result.solution), diagnostics=self.diagnostics())

    def spectrum(self, cap: Optional[int] = None) -> np.ndarray:
        return explicit_spectrum(self.operator_apply, self.preconditioner_apply, self.size, cap=cap)


class ContextAwareSolver(InterfaceSolver):
    """Solver that reports its setup and iteration stages to ContextManager"""

    def build(self) -> "ContextAwareSolver":
        with ContextManager.record_stage(f"{self.name} setup"):
            self.setup()
        return self

    def solve(self, rtol: Optional[float] = None, maxit: Optional[int] = None) -> SolveOutcome:
        with ContextManager.record_stage(f"{self.name} iteration"):
            outcome = InterfaceSolver.solve(self, rtol=rtol, maxit=maxit)
        k = outcome.krylov
        LOGGER.info(f"{self.name}: {k.iterations} iterations, lambda_min={k.lambda_min:.4g} lambda_max={k.lambda_max:.4g}")
        if not k.converged:
            ContextManager.add_warning(f"{self.name} did not converge in {k.iterations} iterations")
        return outcome
