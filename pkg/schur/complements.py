"""Interface Schur complements and their class blocks"""

from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.linalg import splu

import settings
from decomposition.classes import EquivalenceClass
from errors import FactorizationError
from grid.assembly import LocalSystem
from linalg.dense import symmetrize
from logger import LOGGER


@dataclass
class SchurOperator:
    """Dense S^(i) on the interface of one subdomain, keeping the interior factorization"""

    subdomain: int
    matrix: np.ndarray
    system: LocalSystem
    interior_lu: object = None

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def apply(self, w: np.ndarray) -> np.ndarray:
        return self.matrix @ w

    def energy(self, w: np.ndarray) -> float:
        return float(w @ (self.matrix @ w))

    def interior_solve(self, rhs: np.ndarray) -> np.ndarray:
        if self.interior_lu is None:
            return np.zeros(0)
        return self.interior_lu.solve(rhs)

    def condense_rhs(self, f: np.ndarray = None) -> np.ndarray:
        """g = f_Gamma - A_GammaI A_II^{-1} f_I, with the subdomain's own load by default"""
        f = self.system.load if f is None else f
        I, G = self.system.interior, self.system.interface
        g = f[G].copy()
        if len(I):
            g -= self.system.block(G, I) @ self.interior_solve(f[I])
        return g

    def extend(self, w: np.ndarray, f: np.ndarray = None) -> np.ndarray:
        """Full local solution from interface values: u_I = A_II^{-1} (f_I - A_IGamma w)"""
        f = self.system.load if f is None else f
        I, G = self.system.interior, self.system.interface
        u = np.zeros(len(self.system.nodes))
        u[G] = w
        if len(I):
            u[I] = self.interior_solve(f[I] - self.system.block(I, G) @ w)
        return u


def schur_interface(system: LocalSystem) -> SchurOperator:
    I, G = system.interior, system.interface
    S = system.block(G, G).toarray()
    lu = None
    if len(I):
        try:
            lu = splu(sp.csc_matrix(system.block(I, I)))
        except RuntimeError as e:
            raise FactorizationError(f"Interior block of subdomain {system.subdomain} is singular: {e}") from e
        S -= system.block(G, I) @ lu.solve(system.block(I, G).toarray())
    S = symmetrize(S)
    LOGGER.debug(f"Schur complement of subdomain {system.subdomain}: {len(G)} interface, {len(I)} interior dofs")
    return SchurOperator(subdomain=system.subdomain, matrix=S, system=system, interior_lu=lu)


def _matrix(S: Union[SchurOperator, np.ndarray]) -> np.ndarray:
    return S.matrix if isinstance(S, SchurOperator) else np.asarray(S)


def class_block(S: Union[SchurOperator, np.ndarray], cls: EquivalenceClass, l: int) -> np.ndarray:
    """Principal block S_C^(l) on the class dofs"""
    pos = cls.local[l]
    return _matrix(S)[np.ix_(pos, pos)].copy()


def condense(M: np.ndarray, keep: np.ndarray) -> np.ndarray:
    """Schur complement of the dense SPSD matrix M onto the index set `keep`"""
    keep = np.asarray(keep)
    rest = np.setdiff1d(np.arange(M.shape[0]), keep)
    M_kk = M[np.ix_(keep, keep)]
    if len(rest) == 0:
        return symmetrize(M_kk)
    M_rr, M_rk = M[np.ix_(rest, rest)], M[np.ix_(rest, keep)]
    try:
        X = sla.cho_solve(sla.cho_factor(M_rr, lower=True), M_rk)
    except sla.LinAlgError:
        # the eliminated block is SPD in exact arithmetic; fall back to an indefinite solver
        X = sla.solve(M_rr, M_rk, assume_a="sym")
    return symmetrize(M_kk - M_rk.T @ X)


def _floats_on_boundary(S) -> bool:
    """True when S~ must also eliminate the global Dirichlet nodes this subdomain touches"""
    if settings.CONDENSED_BOUNDARY != "free" or not isinstance(S, SchurOperator):
        return False
    system = S.system
    return system.mesh is not None and system.coeff is not None and system.mesh.touches_boundary(system.subdomain)


def class_schur(S: Union[SchurOperator, np.ndarray], cls: EquivalenceClass, l: int, eta: int = None) -> np.ndarray:
    """Condensed block S~_C^(l): every other dof of subdomain l is eliminated.

    With the default free boundary treatment the global Dirichlet nodes of subdomain l count
    among the eliminated dofs, so S~ annihilates constants on every subdomain. That block is
    taken from the whole-subdomain slab; interior subdomains condense S^(l) directly.
    `eta` is the slab width in cells; None is the full version. Slab blocks need the
    SchurOperator for its local system and mesh geometry; use schur.slab.slab_blocks for
    both slab matrices.
    """
    if eta is None and _floats_on_boundary(S):
        eta = S.system.mesh.m
    if eta is not None:
        from schur.slab import slab_blocks

        if not isinstance(S, SchurOperator):
            raise TypeError("Slab condensation needs a SchurOperator")
        _, condensed = slab_blocks(S.system, cls, eta)
        return condensed
    return condense(_matrix(S), cls.local[l])
