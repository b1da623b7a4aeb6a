"""Dense symmetric kernels: pseudo-inverse, parallel sum and the semidefinite generalized eigenproblem"""

from dataclasses import dataclass
from functools import reduce
from typing import List, Sequence, Tuple

import numpy as np

import settings
from logger import LOGGER


def _check_square(M: np.ndarray, name: str = "matrix") -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    return M


def is_symmetric(M: np.ndarray, rtol: float = 1e-10) -> bool:
    scale = max(np.max(np.abs(M)), np.finfo(float).tiny) if M.size else 1.0
    return bool(np.max(np.abs(M - M.T), initial=0.0) <= rtol * scale)


def symmetrize(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)


def pseudo_inverse(M: np.ndarray, rel_tol: float = None) -> np.ndarray:
    """Moore-Penrose inverse of a symmetric PSD matrix, cutting eigenvalues below rel_tol * lambda_max"""
    M = _check_square(M)
    if not is_symmetric(M):
        raise ValueError("pseudo_inverse expects a symmetric matrix")
    rel_tol = settings.PINV_REL_TOL if rel_tol is None else rel_tol
    if M.size == 0:
        return M.copy()

    w, V = np.linalg.eigh(symmetrize(M))
    lam_max = np.max(np.abs(w))
    if lam_max == 0.0:
        return np.zeros_like(M)
    keep = w > rel_tol * lam_max
    Vk = V[:, keep]
    return symmetrize((Vk / w[keep]) @ Vk.T)


def parallel_sum(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """A:B = B (A + B)^+ A"""
    A, B = _check_square(A, "A"), _check_square(B, "B")
    if A.shape != B.shape:
        raise ValueError(f"parallel_sum size mismatch: {A.shape} vs {B.shape}")
    return symmetrize(B @ pseudo_inverse(symmetrize(A + B)) @ A)


def parallel_sum_fold(mats: Sequence[np.ndarray]) -> np.ndarray:
    mats = list(mats)
    if len(mats) < 2:
        raise ValueError(f"parallel_sum_fold needs at least two matrices, got {len(mats)}")
    return reduce(parallel_sum, mats)


def form_gap(A: np.ndarray, B: np.ndarray) -> float:
    """Smallest eigenvalue of B - A relative to the size of B; >= -tol means A <= B as forms"""
    A, B = _check_square(A, "A"), _check_square(B, "B")
    if A.size == 0:
        return 0.0
    scale = max(1.0, np.max(np.abs(np.linalg.eigvalsh(symmetrize(B)))))
    return float(np.linalg.eigvalsh(symmetrize(B - A))[0] / scale)


def form_leq(A: np.ndarray, B: np.ndarray, tol: float = None) -> bool:
    tol = settings.FORM_TOL if tol is None else tol
    return form_gap(A, B) >= -tol


# --- Generalized eigenproblem ---


@dataclass(frozen=True)
class EigPair:
    """Eigenpair of A v = lambda B v. `value` is inf when B v = 0.

    Vectors are A-normalized; pairs with lambda = 0 (A v = 0) are B-normalized and tagged "B".
    """

    value: float
    vector: np.ndarray
    normalization: str = "A"

    @property
    def is_infinite(self) -> bool:
        return bool(np.isinf(self.value))


def joint_null_basis(A: np.ndarray, B: np.ndarray, rel_tol: float = None) -> np.ndarray:
    """Orthonormal basis of null(A) cap null(B), which is null(A + B) for PSD A, B"""
    _, null = _split_active(symmetrize(A + B), rel_tol)
    return null


def _split_active(S: np.ndarray, rel_tol: float = None) -> Tuple[Tuple[np.ndarray, np.ndarray], np.ndarray]:
    rel_tol = settings.PINV_REL_TOL if rel_tol is None else rel_tol
    w, V = np.linalg.eigh(S)
    scale = np.max(np.abs(w)) if w.size else 0.0
    active = w > rel_tol * scale if scale > 0 else np.zeros(len(w), dtype=bool)
    return (w[active], V[:, active]), V[:, ~active]


def generalized_eig_with_null(A: np.ndarray, B: np.ndarray, inf_tol: float = None) -> Tuple[List[EigPair], np.ndarray]:
    """Solve A v = lambda B v for symmetric PSD A, B.

    The pencil is restricted to range(A + B); the joint null space is returned separately
    and carries no pairs. On the active space B y = mu (A + B) y is solved as a standard
    problem, then lambda = (1 - mu) / mu with mu <= inf_tol reported as infinity. Pairs are
    sorted descending, infinite ones first.
    """
    A, B = _check_square(A, "A"), _check_square(B, "B")
    if A.shape != B.shape:
        raise ValueError(f"generalized_eig size mismatch: {A.shape} vs {B.shape}")
    if not (is_symmetric(A) and is_symmetric(B)):
        raise ValueError("generalized_eig expects symmetric matrices")
    inf_tol = settings.EIG_INF_TOL if inf_tol is None else inf_tol
    A, B = symmetrize(A), symmetrize(B)

    (w, Q), null = _split_active(A + B)
    if Q.shape[1] == 0:
        return [], null

    # (A + B) restricted to the active space is diag(w); whiten it
    W = Q / np.sqrt(w)
    A_scale = np.max(np.abs(W.T @ A @ W), initial=0.0)
    if A_scale <= inf_tol:
        LOGGER.warning("Left matrix vanishes on the active space; no eigenpairs")
        return [], null

    mu, Y = np.linalg.eigh(symmetrize(W.T @ B @ W))
    mu = np.clip(mu, 0.0, 1.0)
    V = W @ Y

    pairs = []
    for k in range(len(mu)):
        v = V[:, k]
        if mu[k] <= inf_tol:
            pairs.append(EigPair(np.inf, v / np.sqrt(1.0 - mu[k]), "A"))
        elif 1.0 - mu[k] <= inf_tol:
            pairs.append(EigPair(0.0, v / np.sqrt(mu[k]), "B"))
        else:
            pairs.append(EigPair((1.0 - mu[k]) / mu[k], v / np.sqrt(1.0 - mu[k]), "A"))
    # eigh orders mu ascending, so lambda is already descending
    return pairs, null


def generalized_eig(A: np.ndarray, B: np.ndarray, inf_tol: float = None) -> List[EigPair]:
    pairs, _ = generalized_eig_with_null(A, B, inf_tol)
    return pairs


def eig_values(pairs: Sequence[EigPair]) -> np.ndarray:
    return np.array([p.value for p in pairs])


def eig_vectors(pairs: Sequence[EigPair], n: int) -> np.ndarray:
    if not pairs:
        return np.zeros((n, 0))
    return np.column_stack([p.vector for p in pairs])
