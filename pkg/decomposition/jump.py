"""Fully redundant jump operator B and its scaled counterpart B_D"""

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np
import scipy.sparse as sp

from decomposition.classes import EquivalenceClass, InterfaceMaps
from errors import ConfigurationError
from logger import LOGGER


@dataclass
class JumpBlock:
    class_id: int
    pair: Tuple[int, int]
    rows: slice


@dataclass
class JumpOperator:
    """B acting on the dual dofs [W_Delta^(1), ..., W_Delta^(N)]; vertex dofs carry no multipliers"""

    matrix: sp.csr_matrix
    row_class: np.ndarray
    row_pair: np.ndarray
    row_dof: np.ndarray
    blocks: List[JumpBlock]
    # (class id, subdomain) -> dual columns of the class dofs, in class order
    columns: Dict[Tuple[int, int], np.ndarray] = field(default_factory=dict)

    @property
    def num_multipliers(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_dual(self) -> int:
        return self.matrix.shape[1]

    def apply(self, w_dual: np.ndarray) -> np.ndarray:
        return self.matrix @ w_dual

    def apply_transpose(self, lam: np.ndarray) -> np.ndarray:
        return self.matrix.T @ lam

    def blocks_of(self, class_id: int) -> List[JumpBlock]:
        return [b for b in self.blocks if b.class_id == class_id]


def dual_columns(cls: EquivalenceClass, maps: InterfaceMaps, l: int) -> np.ndarray:
    return maps.dual_offsets[l] + np.searchsorted(maps.dual_local[l], cls.local[l])


def build_jump_operator(classes: List[EquivalenceClass], maps: InterfaceMaps) -> JumpOperator:
    rows, cols, vals = [], [], []
    row_class, row_pair, row_dof, blocks = [], [], [], []
    columns: Dict[Tuple[int, int], np.ndarray] = {}
    nrow = 0

    for cls in classes:
        if cls.is_primal_vertex:
            continue
        for l in cls.sharing:
            columns[(cls.id, l)] = dual_columns(cls, maps, l)
        for a, b in cls.pairs:
            block_rows = np.arange(nrow, nrow + cls.size)
            rows += [block_rows, block_rows]
            cols += [columns[(cls.id, a)], columns[(cls.id, b)]]
            vals += [np.ones(cls.size), -np.ones(cls.size)]
            row_class.append(np.full(cls.size, cls.id))
            row_pair.append(np.tile([a, b], (cls.size, 1)))
            row_dof.append(np.arange(cls.size))
            blocks.append(JumpBlock(class_id=cls.id, pair=(a, b), rows=slice(nrow, nrow + cls.size)))
            nrow += cls.size

    B = sp.coo_matrix(
        (np.concatenate(vals or [np.zeros(0)]), (np.concatenate(rows or [np.zeros(0, int)]), np.concatenate(cols or [np.zeros(0, int)]))),
        shape=(nrow, maps.num_dual),
    ).tocsr()
    LOGGER.debug(f"Jump operator: {nrow} multipliers on {maps.num_dual} dual dofs")
    return JumpOperator(
        matrix=B,
        row_class=np.concatenate(row_class or [np.zeros(0, int)]),
        row_pair=np.concatenate(row_pair or [np.zeros((0, 2), int)]),
        row_dof=np.concatenate(row_dof or [np.zeros(0, int)]),
        blocks=blocks,
        columns=columns,
    )


def build_scaled_jump(jump: JumpOperator, scalings) -> sp.csr_matrix:
    """B_D: in the rows of pair (a, b) the a-columns carry D^(b)^T and the b-columns -D^(a)^T"""
    rows, cols, vals = [], [], []
    for block in jump.blocks:
        a, b = block.pair
        if not scalings.has(block.class_id):
            raise ConfigurationError(f"No scaling for class {block.class_id}")
        D_a, D_b = scalings.block(block.class_id, a), scalings.block(block.class_id, b)
        r = np.arange(block.rows.start, block.rows.stop)
        for cols_l, mat in ((jump.columns[(block.class_id, a)], D_b.T), (jump.columns[(block.class_id, b)], -D_a.T)):
            rr, cc = np.meshgrid(r, cols_l, indexing="ij")
            rows.append(rr.ravel())
            cols.append(cc.ravel())
            vals.append(np.asarray(mat).ravel())

    if not rows:
        return sp.csr_matrix(jump.matrix.shape)
    B_D = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=jump.matrix.shape)
    B_D = B_D.tocsr()
    B_D.eliminate_zeros()
    return B_D
