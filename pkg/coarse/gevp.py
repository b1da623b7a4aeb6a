"""Face and edge generalized eigenproblems for adaptive primal constraints"""

from typing import Mapping, Tuple

import numpy as np

import settings
from coarse.selection import TWO_SIDED, UPPER, EigSelection
from errors import ClassificationError, CoarseSpaceError, ConfigurationError
from linalg.dense import form_gap, generalized_eig_with_null, parallel_sum, parallel_sum_fold, symmetrize


def _check_partition(D_blocks, size: int, class_id=None):
    err = np.max(np.abs(sum(D_blocks) - np.eye(size)), initial=0.0)
    if err > 1e-8:
        raise ConfigurationError(f"Scalings of class {class_id} do not sum to the identity (error {err:.2e})")


def _selection(class_id, problem: str, left: np.ndarray, right: np.ndarray, rule: str = UPPER) -> EigSelection:
    left, right = symmetrize(left), symmetrize(right)
    pairs, null = generalized_eig_with_null(left, right)
    return EigSelection(class_id=class_id, problem=problem, left=left, right=right, pairs=pairs, null_basis=null, rule=rule)


def face_gevp(S_i, S_j, St_i, St_j, D_i, D_j, class_id=None) -> EigSelection:
    """A_F v = lambda (S~_F^(i) : S~_F^(j)) v with A_F = D_j^T S_i D_j + D_i^T S_j D_i"""
    n = S_i.shape[0]
    for M in (S_j, St_i, St_j, D_i, D_j):
        if M.shape != (n, n):
            raise ValueError(f"Face blocks must all be {n}x{n}, got {M.shape}")
    _check_partition([D_i, D_j], n, class_id)
    A_F = D_j.T @ S_i @ D_j + D_i.T @ S_j @ D_i
    return _selection(class_id, "face", A_F, parallel_sum(St_i, St_j))


def pairwise_face_gevps(St_i, St_j, S_i, S_j, class_id=None) -> Tuple[EigSelection, EigSelection]:
    """Type 1: S~_i v = lambda S~_j v (two-sided selection). Type 2: (S_i + S_j) v = lambda (S~_i + S~_j) v"""
    first = _selection(class_id, "pairwise1", St_i, St_j, rule=TWO_SIDED)
    second = _selection(class_id, "pairwise2", S_i + S_j, St_i + St_j)
    return first, second


def edge_left_matrix(sharing, S_blocks: Mapping[int, np.ndarray], D_blocks: Mapping[int, np.ndarray]) -> np.ndarray:
    """A_E = sum_m sum_{l != m} D_l^T S_m D_l"""
    return sum(D_blocks[l].T @ S_blocks[m] @ D_blocks[l] for m in sharing for l in sharing if l != m)


def edge_local_form(m: int, sharing, S_blocks: Mapping[int, np.ndarray], D_blocks: Mapping[int, np.ndarray]) -> np.ndarray:
    """A_E^(m) = sum_{l != m} (D_l^T S_m D_l + D_m^T S_l D_m), the part of A_E seen from subdomain m"""
    return sum(
        D_blocks[l].T @ S_blocks[m] @ D_blocks[l] + D_blocks[m].T @ S_blocks[l] @ D_blocks[m] for l in sharing if l != m
    )


def edge_gevp(
    cls, S_blocks: Mapping[int, np.ndarray], St_blocks: Mapping[int, np.ndarray], D_blocks: Mapping[int, np.ndarray]
) -> EigSelection:
    """A_E v = lambda (S~_E^(1) : ... : S~_E^(q)) v for an edge shared by q >= 3 subdomains"""
    sharing = tuple(cls.sharing)
    if len(sharing) < 3:
        raise ClassificationError(f"Edge eigenproblem needs at least three sharing subdomains, class {cls.id} has {len(sharing)}")
    _check_partition([D_blocks[l] for l in sharing], cls.size, cls.id)

    A_E = symmetrize(edge_left_matrix(sharing, S_blocks, D_blocks))
    St_E = parallel_sum_fold([St_blocks[l] for l in sharing])

    tol = settings.FORM_TOL
    for m in sharing:
        if form_gap(edge_local_form(m, sharing, S_blocks, D_blocks), A_E) < -tol:
            raise CoarseSpaceError(f"A_E^({m}) <= A_E fails on edge {cls.id}")
        if form_gap(St_E, St_blocks[m]) < -tol:
            raise CoarseSpaceError(f"S~_E <= S~_E^({m}) fails on edge {cls.id}")

    return _selection(cls.id, "edge", A_E, St_E)
