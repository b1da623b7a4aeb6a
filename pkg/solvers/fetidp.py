"""
FETI-DP with vertex primal unknowns and the projector preconditioner.

Adaptive constraints enter only through U: P = U (U^T F U)^{-1} U^T F and
M_PP^{-1} = (I - P) M_FETI^{-1} (I - P)^T, where M_FETI^{-1} = B_D S~ B_D^T.
"""

from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Tuple

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

import settings
from coarse.selection import PrimalConstraintSet
from context.manager import ContextManager
from decomposition.jump import JumpOperator, build_jump_operator, build_scaled_jump
from errors import FactorizationError
from linalg.dense import symmetrize
from logger import LOGGER
from scaling.scalings import ScalingSet
from solvers.base import ContextAwareSolver, InterfaceProblem
from solvers.bddc import BDDCSolver
from solvers.partially_coupled import PartiallyCoupledSpace

# columns whose pivot falls below this fraction of the largest are dropped from U
PRUNE_REL_TOL = 1e-10


class DualSystem:
    """F = B S~^{-1} B^T and d = B S~^{-1} g~ over the vertex-coupled space"""

    def __init__(self, space: PartiallyCoupledSpace, jump: JumpOperator, g_tilde: np.ndarray, scaled_jump: sp.csr_matrix):
        self.space = space
        self.jump = jump
        self.g_tilde = g_tilde
        self.B_D = scaled_jump
        self.d = jump.apply(space.dual_part(space.solve(g_tilde)))

    @property
    def size(self) -> int:
        return self.jump.num_multipliers

    def apply(self, lam: np.ndarray) -> np.ndarray:
        w = self.space.solve(self.space.with_dual(self.jump.apply_transpose(lam)))
        return self.jump.apply(self.space.dual_part(w))

    def dirichlet_apply(self, r: np.ndarray) -> np.ndarray:
        """M_FETI^{-1} r = B_D S~ B_D^T r"""
        w = self.space.apply(self.space.with_dual(self.B_D.T @ r))
        return self.B_D @ self.space.dual_part(w)

    def primal_solution(self, lam: np.ndarray) -> np.ndarray:
        return self.space.solve(self.g_tilde - self.space.with_dual(self.jump.apply_transpose(lam)))

    def interface_solution(self, lam: np.ndarray) -> np.ndarray:
        return self.space.gather_scaled(self.primal_solution(lam))


def tilde_rhs(space: PartiallyCoupledSpace, problem: InterfaceProblem) -> np.ndarray:
    """g~: local condensed loads on the dual dofs, assembled on the primal ones"""
    g = np.zeros(space.size)
    for i in space.locals:
        space.add_local(i, problem.local_rhs(i), g)
    return g


def assemble_dual_system(problem: InterfaceProblem, scalings: ScalingSet) -> DualSystem:
    space = PartiallyCoupledSpace(problem.classes, problem.maps, problem.schurs, scalings)
    jump = build_jump_operator(problem.classes, problem.maps)
    return DualSystem(space, jump, tilde_rhs(space, problem), build_scaled_jump(jump, scalings))


def build_U(constraints: Mapping[int, np.ndarray], jump: JumpOperator) -> Tuple[sp.csr_matrix, List[Tuple[int, Tuple[int, int], int]]]:
    """One column per (class, sharing pair, constraint) carrying the constraint vector at the pair's rows"""
    rows, cols, vals, labels = [], [], [], []
    for cid in sorted(constraints):
        C = np.asarray(constraints[cid])
        if C.ndim != 2 or C.shape[1] == 0:
            continue
        for block in jump.blocks_of(cid):
            r = np.arange(block.rows.start, block.rows.stop)
            for n in range(C.shape[1]):
                rows.append(r)
                cols.append(np.full(len(r), len(labels)))
                vals.append(C[:, n])
                labels.append((cid, block.pair, n))

    shape = (jump.num_multipliers, len(labels))
    if not labels:
        return sp.csr_matrix(shape), labels
    U = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=shape).tocsr()
    return U, labels


@dataclass
class ProjectorData:
    U: np.ndarray
    FU: np.ndarray
    gram_factor: tuple
    gram_condition: float
    kept: np.ndarray
    pruned: int = 0
    labels: List[tuple] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return self.U.shape[1]

    def _gram_solve(self, y: np.ndarray) -> np.ndarray:
        return sla.cho_solve(self.gram_factor, y)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """P x = U G^{-1} (F U)^T x"""
        return self.U @ self._gram_solve(self.FU.T @ x)

    def complement(self, x: np.ndarray) -> np.ndarray:
        return x - self.apply(x)

    def complement_transpose(self, r: np.ndarray) -> np.ndarray:
        """(I - P)^T r = r - F U G^{-1} U^T r"""
        return r - self.FU @ self._gram_solve(self.U.T @ r)

    def initial_iterate(self, d: np.ndarray) -> np.ndarray:
        """lambda_0 = U G^{-1} U^T d, making U^T (d - F lambda_0) = 0"""
        return self.U @ self._gram_solve(self.U.T @ d)

    def idempotency_error(self, seed: int = 0) -> float:
        """||P(Px) - Px|| / ||x|| on one random x"""
        x = np.random.default_rng(seed).standard_normal(self.U.shape[0])
        Px = self.apply(x)
        return float(np.linalg.norm(self.apply(Px) - Px) / np.linalg.norm(x))


def build_projector(U: sp.spmatrix, F_apply, labels: Optional[List[tuple]] = None) -> Optional[ProjectorData]:
    """Factor the Gram matrix U^T F U after dropping columns that are dependent in the F inner product"""
    U = np.asarray(U.toarray() if sp.issparse(U) else U, dtype=float)
    if U.shape[1] == 0:
        return None

    FU = np.column_stack([F_apply(U[:, j]) for j in range(U.shape[1])])
    G = symmetrize(U.T @ FU)

    _, R, piv = sla.qr(G, pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > PRUNE_REL_TOL * diag[0])) if diag.size and diag[0] > 0 else 0
    if rank == 0:
        LOGGER.warning("Projector columns are all in the kernel of F; projector disabled")
        return None
    kept = np.sort(piv[:rank])
    pruned = U.shape[1] - rank
    if pruned:
        message = f"Dropped {pruned} of {U.shape[1]} projector columns dependent in the F inner product"
        LOGGER.info(message)
        ContextManager.add_warning(message)

    G = G[np.ix_(kept, kept)]
    try:
        factor = sla.cho_factor(G, lower=True)
    except sla.LinAlgError as e:
        raise FactorizationError(f"Gram matrix U^T F U is not positive definite: {e}") from e

    cond = float(np.linalg.cond(G))
    if cond > settings.GRAM_COND_WARN:
        message = f"Gram matrix U^T F U is ill-conditioned (cond {cond:.3e}); projected iteration may lose accuracy"
        LOGGER.warning(message)
        ContextManager.add_warning(message)

    return ProjectorData(
        U=U[:, kept],
        FU=FU[:, kept],
        gram_factor=factor,
        gram_condition=cond,
        kept=kept,
        pruned=pruned,
        labels=[labels[j] for j in kept] if labels else [],
    )


def mpp_apply(projector: Optional[ProjectorData], dirichlet_apply, r: np.ndarray) -> np.ndarray:
    """(I - P) M_FETI^{-1} (I - P)^T r"""
    if projector is None:
        return dirichlet_apply(r)
    return projector.complement(dirichlet_apply(projector.complement_transpose(r)))


class FETIDPSolver(ContextAwareSolver):
    name = "FETI-DP"

    def __init__(self, problem: InterfaceProblem, scalings: ScalingSet, constraints: Optional[PrimalConstraintSet] = None):
        self.problem = problem
        self.scalings = scalings
        self.constraints = constraints
        self.dual: Optional[DualSystem] = None
        self.projector: Optional[ProjectorData] = None

    def setup(self) -> None:
        self.dual = assemble_dual_system(self.problem, self.scalings)
        if self.constraints is not None and self.constraints.pnum:
            U, labels = build_U(self.constraints.constraints, self.dual.jump)
            self.projector = build_projector(U, self.dual.apply, labels)

    @property
    def size(self) -> int:
        return self.dual.size

    def operator_apply(self, x: np.ndarray) -> np.ndarray:
        return self.dual.apply(x)

    def preconditioner_apply(self, r: np.ndarray) -> np.ndarray:
        return mpp_apply(self.projector, self.dual.dirichlet_apply, r)

    def iteration_rhs(self) -> np.ndarray:
        return self.dual.d

    def _pcg_options(self) -> dict:
        if self.projector is None:
            return {}
        return {"x0": self.projector.initial_iterate(self.dual.d), "residual_projection": self.projector.complement_transpose}

    def recover_interface(self, x: np.ndarray) -> np.ndarray:
        return self.dual.interface_solution(x)

    def diagnostics(self) -> dict:
        out = {"primal_total": self.dual.space.n_primal, "multipliers": self.dual.size}
        if self.projector is not None:
            out.update(
                {
                    "gram_condition": self.projector.gram_condition,
                    "projector_rank": self.projector.rank,
                    "pruned": self.projector.pruned,
                    "idempotency_error": self.projector.idempotency_error(),
                }
            )
        return out


def vertex_primal_pair(problem: InterfaceProblem, scalings: ScalingSet) -> Tuple[BDDCSolver, FETIDPSolver]:
    """BDDC and FETI-DP with vertex constraints only and the same scalings"""
    bddc = BDDCSolver(problem, scalings)
    bddc.setup()
    feti = FETIDPSolver(problem, scalings)
    feti.setup()
    return bddc, feti
