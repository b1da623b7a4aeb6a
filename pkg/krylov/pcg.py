"""Preconditioned conjugate gradients with Ritz estimates of the extreme eigenvalues"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
import scipy.linalg as sla

import settings
from errors import IndefiniteOperatorError
from logger import LOGGER

Apply = Callable[[np.ndarray], np.ndarray]


@dataclass
class KrylovResult:
    solution: np.ndarray
    iterations: int
    converged: bool
    # relative residual ||r_k|| / ||r_0||, starting with 1.0
    residuals: List[float] = field(default_factory=list)
    lambda_min: float = 1.0
    lambda_max: float = 1.0

    @property
    def kappa(self) -> float:
        if self.lambda_min <= 0:
            return float("inf")
        return self.lambda_max / self.lambda_min

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "lambda_min": self.lambda_min,
            "lambda_max": self.lambda_max,
            "kappa": self.kappa,
            "residuals": list(self.residuals),
        }


def lanczos_tridiagonal(alphas: List[float], betas: List[float]):
    """Diagonal and off-diagonal of the Lanczos matrix equivalent to j CG steps"""
    alphas = np.asarray(alphas, dtype=float)
    betas = np.asarray(betas[: len(alphas) - 1], dtype=float)
    diagonal = 1.0 / alphas
    diagonal[1:] += betas / alphas[:-1]
    off = np.sqrt(betas) / alphas[:-1]
    return diagonal, off


def ritz_values(alphas: List[float], betas: List[float]) -> np.ndarray:
    if not alphas:
        return np.ones(1)
    diagonal, off = lanczos_tridiagonal(alphas, betas)
    if len(diagonal) == 1:
        return diagonal
    return sla.eigvalsh_tridiagonal(diagonal, off)


def pcg(
    op: Apply,
    precond: Apply,
    rhs: np.ndarray,
    rtol: Optional[float] = None,
    maxit: Optional[int] = None,
    x0: Optional[np.ndarray] = None,
    residual_projection: Optional[Apply] = None,
) -> KrylovResult:
    """Solve op(x) = rhs.

    `residual_projection` is applied to the residual at the start and after every update; the
    projected FETI-DP iteration uses it to keep the residual in Range((I-P)^T).
    """
    rtol = settings.PCG_RTOL if rtol is None else rtol
    maxit = settings.PCG_MAXIT if maxit is None else maxit

    x = np.zeros_like(rhs, dtype=float) if x0 is None else np.array(x0, dtype=float, copy=True)
    r = rhs - op(x) if x0 is not None else np.array(rhs, dtype=float, copy=True)
    if residual_projection is not None:
        r = residual_projection(r)

    r0 = float(np.linalg.norm(r))
    if r0 == 0.0:
        return KrylovResult(solution=x, iterations=0, converged=True, residuals=[0.0])

    z = precond(r)
    rz = float(r @ z)
    if rz <= 0:
        raise IndefiniteOperatorError(f"Preconditioner is not positive on the initial residual (r.z = {rz:.3e})")
    p = z.copy()

    alphas: List[float] = []
    betas: List[float] = []
    residuals = [1.0]
    converged = False

    for it in range(1, maxit + 1):
        q = op(p)
        pq = float(p @ q)
        if pq <= 0:
            raise IndefiniteOperatorError(f"p.Ap = {pq:.3e} at iteration {it}")
        alpha = rz / pq
        alphas.append(alpha)
        x += alpha * p
        r -= alpha * q
        if residual_projection is not None:
            r = residual_projection(r)

        residuals.append(float(np.linalg.norm(r)) / r0)
        if residuals[-1] <= rtol:
            converged = True
            break

        z = precond(r)
        rz_new = float(r @ z)
        if rz_new <= 0:
            raise IndefiniteOperatorError(f"r.Mr = {rz_new:.3e} at iteration {it}")
        beta = rz_new / rz
        betas.append(beta)
        p = z + beta * p
        rz = rz_new

    ritz = ritz_values(alphas, betas)
    result = KrylovResult(
        solution=x,
        iterations=len(alphas),
        converged=converged,
        residuals=residuals,
        lambda_min=float(ritz[0]),
        lambda_max=float(ritz[-1]),
    )
    if not converged:
        LOGGER.warning(f"PCG stopped after {maxit} iterations at relative residual {residuals[-1]:.3e}")
    LOGGER.debug(f"PCG: {result.iterations} iterations, lambda in [{result.lambda_min:.4g}, {result.lambda_max:.4g}]")
    return result
