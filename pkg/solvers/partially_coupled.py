"""
The partially coupled space W~ = W_Delta x W^_Pi and the operator S~_a on it.

All vectors live in change-of-basis coordinates: every non-vertex class C with a basis P_C
stores the coefficients c with w_C = P_C c, and its first k_C coefficients are primal.
A vector of W~ is laid out as [Delta^(1), ..., Delta^(N), Pi].
"""

from dataclasses import replace
from typing import Dict, List, Mapping, Optional

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from coarse.change_of_basis import ChangeOfBasis
from decomposition.classes import EquivalenceClass, InterfaceMaps
from errors import FactorizationError
from linalg.dense import symmetrize
from logger import LOGGER
from scaling.scalings import ScalingSet, transformed_scaling
from schur.complements import SchurOperator


def _block_diagonal(n: int, blocks) -> sp.csr_matrix:
    rows, cols, vals = [np.arange(n)], [np.arange(n)], [np.zeros(n)]
    diagonal = np.ones(n)
    for pos, M in blocks:
        diagonal[pos] = 0.0
        rr, cc = np.meshgrid(pos, pos, indexing="ij")
        rows.append(rr.ravel())
        cols.append(cc.ravel())
        vals.append(np.asarray(M).ravel())
    vals[0] = diagonal
    return sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)).tocsr()


class LocalBlock:
    """One subdomain's transformed Schur complement split into dual and primal coordinates"""

    def __init__(
        self,
        subdomain: int,
        S_check: np.ndarray,
        dual: np.ndarray,
        primal: np.ndarray,
        primal_ids: np.ndarray,
        scaling: sp.csr_matrix,
    ):
        self.subdomain = subdomain
        self.S = S_check
        self.dual = dual
        self.primal = primal
        self.primal_ids = primal_ids
        self.scaling = scaling

        S_dd = S_check[np.ix_(dual, dual)]
        S_dp = S_check[np.ix_(dual, primal)]
        S_pp = S_check[np.ix_(primal, primal)]
        if len(dual):
            try:
                self.factor = sla.cho_factor(symmetrize(S_dd), lower=True)
            except sla.LinAlgError as e:
                raise FactorizationError(f"Dual block of subdomain {subdomain} is not positive definite: {e}") from e
            self.Phi = sla.cho_solve(self.factor, S_dp)
            self.coarse = symmetrize(S_pp - S_dp.T @ self.Phi)
        else:
            self.factor = None
            self.Phi = np.zeros((0, len(primal)))
            self.coarse = symmetrize(S_pp)

    @property
    def size(self) -> int:
        return self.S.shape[0]

    def dual_solve(self, y: np.ndarray) -> np.ndarray:
        if self.factor is None:
            return np.zeros(0)
        return sla.cho_solve(self.factor, y)


class PartiallyCoupledSpace:
    def __init__(
        self,
        classes: List[EquivalenceClass],
        maps: InterfaceMaps,
        schurs: Mapping[int, SchurOperator],
        scalings: ScalingSet,
        bases: Optional[Mapping[int, ChangeOfBasis]] = None,
    ):
        self.classes = classes
        self.maps = maps
        self.bases: Dict[int, ChangeOfBasis] = {cid: b for cid, b in (bases or {}).items() if b.kind != "identity"}
        self.n_hat = maps.num_interface

        primal = np.zeros(self.n_hat, dtype=bool)
        primal[maps.vertex_positions] = True
        for cid, basis in self.bases.items():
            primal[classes[cid].positions[: basis.k]] = True
        self.primal_positions = np.flatnonzero(primal)
        primal_id = np.full(self.n_hat, -1, dtype=np.int64)
        primal_id[self.primal_positions] = np.arange(len(self.primal_positions))

        transformed = {
            cid: {l: transformed_scaling(scalings.block(cid, l), basis.matrix, basis.k) for l in classes[cid].sharing}
            for cid, basis in self.bases.items()
        }
        self.scalings = scalings = replace(scalings, transformed=transformed)

        self.locals: Dict[int, LocalBlock] = {}
        self.offsets: Dict[int, int] = {}
        offset = 0
        for i in maps.subdomains:
            R = maps.restriction[i]
            n_i = len(R)
            mine = [c for c in classes if i in c.sharing]

            T = _block_diagonal(n_i, [(c.local[i], self.bases[c.id].matrix) for c in mine if c.id in self.bases])
            X = T.T @ schurs[i].matrix
            S_check = symmetrize(np.asarray((T.T @ X.T).T))

            D = _block_diagonal(n_i, [(c.local[i], scalings.local(c.id, i)) for c in mine])
            is_primal = primal[R]
            dual, prim = np.flatnonzero(~is_primal), np.flatnonzero(is_primal)
            self.locals[i] = LocalBlock(i, S_check, dual, prim, primal_id[R[prim]], D)
            self.offsets[i] = offset
            offset += len(dual)

        self.n_dual = offset
        self.n_primal = len(self.primal_positions)

        coarse = np.zeros((self.n_primal, self.n_primal))
        for block in self.locals.values():
            coarse[np.ix_(block.primal_ids, block.primal_ids)] += block.coarse
        try:
            self.coarse_factor = sla.cho_factor(symmetrize(coarse), lower=True)
        except sla.LinAlgError as e:
            raise FactorizationError(f"Coarse matrix of size {self.n_primal} is singular: {e}") from e
        self.coarse_matrix = coarse

        LOGGER.info(f"Partially coupled space: {self.n_dual} dual and {self.n_primal} primal dofs")

    @property
    def size(self) -> int:
        return self.n_dual + self.n_primal

    # --- Layout helpers ---

    def dual_slice(self, i: int) -> slice:
        start = self.offsets[i]
        return slice(start, start + len(self.locals[i].dual))

    def local_vector(self, i: int, w: np.ndarray) -> np.ndarray:
        block = self.locals[i]
        out = np.zeros(block.size)
        out[block.dual] = w[self.dual_slice(i)]
        out[block.primal] = w[self.n_dual + block.primal_ids]
        return out

    def add_local(self, i: int, v: np.ndarray, out: np.ndarray) -> np.ndarray:
        block = self.locals[i]
        out[self.dual_slice(i)] += v[block.dual]
        np.add.at(out, self.n_dual + block.primal_ids, v[block.primal])
        return out

    def dual_part(self, w: np.ndarray) -> np.ndarray:
        return w[: self.n_dual]

    def with_dual(self, w_dual: np.ndarray) -> np.ndarray:
        out = np.zeros(self.size)
        out[: self.n_dual] = w_dual
        return out

    # --- S~ ---

    def apply(self, w: np.ndarray) -> np.ndarray:
        out = np.zeros(self.size)
        for i, block in self.locals.items():
            self.add_local(i, block.S @ self.local_vector(i, w), out)
        return out

    def solve(self, y: np.ndarray) -> np.ndarray:
        """S~^{-1} y by eliminating the dual blocks and solving the dense coarse system"""
        rhs = y[self.n_dual :].copy()
        for i, block in self.locals.items():
            np.add.at(rhs, block.primal_ids, -(block.Phi.T @ y[self.dual_slice(i)]))
        x_primal = sla.cho_solve(self.coarse_factor, rhs)

        x = np.zeros(self.size)
        x[self.n_dual :] = x_primal
        for i, block in self.locals.items():
            x[self.dual_slice(i)] = block.dual_solve(y[self.dual_slice(i)]) - block.Phi @ x_primal[block.primal_ids]
        return x

    def energy(self, w: np.ndarray) -> float:
        return float(w @ self.apply(w))

    # --- Restriction and scaled averaging ---

    def restrict(self, u: np.ndarray) -> np.ndarray:
        """R~: assembled interface vector to W~"""
        out = np.zeros(self.size)
        for i, block in self.locals.items():
            out[self.dual_slice(i)] = u[self.maps.restriction[i][block.dual]]
        out[self.n_dual :] = u[self.primal_positions]
        return out

    def gather(self, w: np.ndarray) -> np.ndarray:
        """R~^T"""
        out = np.zeros(self.n_hat)
        for i, block in self.locals.items():
            np.add.at(out, self.maps.restriction[i][block.dual], w[self.dual_slice(i)])
        out[self.primal_positions] += w[self.n_dual :]
        return out

    def gather_scaled(self, w: np.ndarray) -> np.ndarray:
        """R~^T D~: sum_i R_i^T D_i w_i over the local expansions of w"""
        out = np.zeros(self.n_hat)
        for i, block in self.locals.items():
            np.add.at(out, self.maps.restriction[i], block.scaling @ self.local_vector(i, w))
        return out

    def distribute_scaled(self, u: np.ndarray) -> np.ndarray:
        """D~^T R~, the adjoint of gather_scaled"""
        out = np.zeros(self.size)
        for i, block in self.locals.items():
            self.add_local(i, block.scaling.T @ u[self.maps.restriction[i]], out)
        return out

    def average(self, w: np.ndarray) -> np.ndarray:
        """E_D = R~ R~^T D~"""
        return self.restrict(self.gather_scaled(w))

    # --- Assembled interface operator in transformed coordinates ---

    def interface_apply(self, u: np.ndarray) -> np.ndarray:
        out = np.zeros(self.n_hat)
        for i, block in self.locals.items():
            R = self.maps.restriction[i]
            np.add.at(out, R, block.S @ u[R])
        return out

    # --- Coordinates ---

    def to_transformed(self, u: np.ndarray) -> np.ndarray:
        c = np.array(u, dtype=float, copy=True)
        for cid, basis in self.bases.items():
            pos = self.classes[cid].positions
            c[pos] = basis.to_coordinates(u[pos])
        return c

    def from_transformed(self, c: np.ndarray) -> np.ndarray:
        u = np.array(c, dtype=float, copy=True)
        for cid, basis in self.bases.items():
            pos = self.classes[cid].positions
            u[pos] = basis.from_coordinates(c[pos])
        return u

    def transpose_transform(self, g: np.ndarray) -> np.ndarray:
        """P^T g, mapping a functional (right-hand side) into transformed coordinates"""
        out = np.array(g, dtype=float, copy=True)
        for cid, basis in self.bases.items():
            pos = self.classes[cid].positions
            out[pos] = basis.matrix.T @ g[pos]
        return out
