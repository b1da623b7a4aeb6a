"""Per-class change of basis making selected constraints explicit primal coordinates"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from coarse.selection import EigSelection, orthonormal_constraints
from context.manager import ContextManager
from linalg.dense import eig_vectors
from logger import LOGGER

# above this condition number the eigenvector basis is replaced by an orthonormal completion
MAX_BASIS_COND = 1e10


@dataclass
class ChangeOfBasis:
    """w_C = P c; the first k coordinates of c are the primal ones"""

    class_id: int
    matrix: np.ndarray
    k: int
    kind: str = "eigen"

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.matrix)

    def transform_block(self, S: np.ndarray) -> np.ndarray:
        S_check = self.matrix.T @ S @ self.matrix
        return 0.5 * (S_check + S_check.T)

    def to_coordinates(self, w: np.ndarray) -> np.ndarray:
        return self.inverse @ w

    def from_coordinates(self, c: np.ndarray) -> np.ndarray:
        return self.matrix @ c


def identity_basis(class_id: int, size: int) -> ChangeOfBasis:
    return ChangeOfBasis(class_id=class_id, matrix=np.eye(size), k=0, kind="identity")


def change_of_basis_from_constraints(class_id: int, C: np.ndarray) -> ChangeOfBasis:
    """Orthogonal P = [Q, N] with Q an orthonormal basis of span(C) and N its complement"""
    size = C.shape[0]
    Q = orthonormal_constraints(C)
    if Q.shape[1] == 0:
        return identity_basis(class_id, size)
    N = sla.null_space(Q.T)
    return ChangeOfBasis(class_id=class_id, matrix=np.hstack([Q, N]), k=Q.shape[1], kind="orthonormal")


def change_of_basis(selection: EigSelection) -> ChangeOfBasis:
    """P = [selected eigenvectors, remaining eigenvectors, joint null space basis]"""
    n = selection.size
    if selection.k == 0:
        return identity_basis(selection.class_id, n)

    rest = [p for idx, p in enumerate(selection.pairs) if idx not in set(selection.selected)]
    P = np.hstack([eig_vectors(selection.selected_pairs, n), eig_vectors(rest, n), selection.null_basis])

    if P.shape[1] == n:
        cond = np.linalg.cond(P)
        if np.isfinite(cond) and cond < MAX_BASIS_COND:
            return ChangeOfBasis(class_id=selection.class_id, matrix=P, k=selection.k, kind="eigen")
    else:
        cond = np.inf

    message = f"Eigenvector basis of class {selection.class_id} is unusable (cond {cond:.2e}); using an orthonormal completion"
    LOGGER.warning(message)
    ContextManager.add_warning(message)
    return change_of_basis_from_constraints(selection.class_id, selection.constraints())
