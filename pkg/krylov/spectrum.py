"""Explicit spectrum of a preconditioned operator, for small problems"""

from typing import Callable, Optional

import numpy as np
import scipy.linalg as sla

import settings
from errors import SpectrumCapError
from linalg.dense import symmetrize
from logger import LOGGER


def materialize(apply: Callable[[np.ndarray], np.ndarray], dim: int) -> np.ndarray:
    """Dense matrix of a linear operator, one column per unit vector"""
    columns = np.empty((dim, dim))
    e = np.zeros(dim)
    for j in range(dim):
        e[j] = 1.0
        columns[:, j] = apply(e)
        e[j] = 0.0
    return columns


def explicit_spectrum(op, precond, dim: int, cap: Optional[int] = None) -> np.ndarray:
    """All eigenvalues of precond(op(.)), ascending"""
    cap = settings.SPECTRUM_CAP if cap is None else cap
    if dim > cap:
        raise SpectrumCapError(f"Operator dimension {dim} exceeds the spectrum cap {cap}")

    A = symmetrize(materialize(op, dim))
    M = symmetrize(materialize(precond, dim))
    try:
        L = np.linalg.cholesky(A)
        return sla.eigvalsh(L.T @ M @ L)
    except np.linalg.LinAlgError:
        LOGGER.debug("Operator is singular; using the nonsymmetric eigensolver")
        return np.sort(np.linalg.eigvals(M @ A).real)
