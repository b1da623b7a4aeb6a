"""Economic eigenproblem blocks from the stiffness restricted to a slab around a class"""

from typing import Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

import settings
from decomposition.classes import EquivalenceClass
from errors import ConfigurationError, FactorizationError
from grid.assembly import LocalSystem, assemble_cells
from linalg.dense import symmetrize
from logger import LOGGER


def slab_cells(system: LocalSystem, cls: EquivalenceClass, width: int) -> np.ndarray:
    """Cells of the subdomain within `width` cells (max-norm) of the class nodes"""
    mesh = system.mesh
    coords = mesh.node_coords(cls.nodes)
    lo, hi = coords.min(axis=0), coords.max(axis=0)
    cells = mesh.subdomain_cells(system.subdomain)
    cc = mesh.cell_coords(cells)
    inside = np.all((cc + 1 > lo - width) & (cc < hi + width), axis=1)
    return cells[inside]


def condense_sparse(A: sp.spmatrix, keep: np.ndarray) -> np.ndarray:
    """Dense Schur complement of the sparse SPSD matrix A onto `keep`"""
    A = sp.csr_matrix(A)
    rest = np.setdiff1d(np.arange(A.shape[0]), keep)
    A_kk = A[keep][:, keep].toarray()
    if len(rest) == 0:
        return symmetrize(A_kk)
    try:
        lu = splu(sp.csc_matrix(A[rest][:, rest]))
    except RuntimeError as e:
        raise FactorizationError(f"Singular slab block: {e}") from e
    A_rk = A[rest][:, keep].toarray()
    return symmetrize(A_kk - A_rk.T @ lu.solve(A_rk))


def slab_blocks(
    system: LocalSystem, cls: EquivalenceClass, width: int, cut: str = None, boundary: str = None
) -> Tuple[np.ndarray, np.ndarray]:
    """(S_C^eta, S~_C^eta) for subdomain `system.subdomain` and a slab `width` cells thick.

    The principal block eliminates the slab nodes off the subdomain interface, holding the
    other interface nodes and the global Dirichlet nodes at zero; the condensed block
    eliminates every slab node except the class. On the cut side of the slab the nodes are
    free ("neumann") or held at zero ("dirichlet"). `boundary` decides whether the condensed
    block also eliminates the global Dirichlet nodes ("free") or keeps them at zero ("fixed").
    """
    if system.mesh is None or system.coeff is None:
        raise ConfigurationError("Slab blocks need a local system assembled with its mesh and coefficient")
    if width < 1:
        raise ConfigurationError(f"Slab width must be at least one cell, got {width}")
    cut = (cut or settings.SLAB_CUT).lower()
    if cut not in ("neumann", "dirichlet"):
        raise ConfigurationError(f"Unknown slab cut condition: {cut}")
    boundary = (boundary or settings.CONDENSED_BOUNDARY).lower()
    if boundary not in ("free", "fixed"):
        raise ConfigurationError(f"Unknown condensed boundary treatment: {boundary}")

    mesh, i = system.mesh, system.subdomain
    cells = slab_cells(system, cls, width)
    corners = np.unique(mesh.cell_corner_nodes(cells))
    nodes = corners if boundary == "free" else np.intersect1d(corners, system.nodes)
    A = assemble_cells(mesh, cells, system.coeff, nodes)

    outside = np.setdiff1d(mesh.subdomain_cells(i), cells)
    touching_outside = np.unique(mesh.cell_corner_nodes(outside)) if len(outside) else np.zeros(0, np.int64)
    on_interface = np.isin(nodes, system.interface_nodes)
    in_class = np.isin(nodes, cls.nodes)
    on_dirichlet = mesh.is_dirichlet(nodes)
    on_cut = np.isin(nodes, touching_outside) & ~on_interface & ~on_dirichlet

    drop = on_cut if cut == "dirichlet" else np.zeros(len(nodes), dtype=bool)

    def block(exclude: np.ndarray) -> np.ndarray:
        kept = np.flatnonzero(~exclude)
        sub = A[kept][:, kept]
        keep = np.flatnonzero(in_class[kept])
        return condense_sparse(sub, keep)

    principal = block(drop | on_dirichlet | (on_interface & ~in_class))
    condensed = block(drop)
    LOGGER.debug(f"Slab for class {cls.id} in subdomain {i}: width {width}, {len(cells)} cells, {cut} cut")
    return principal, condensed


def parse_eta(spec, mesh) -> int:
    """Slab width in cells from "full", "h", "<k>h", "H" or a length that is a multiple of h; None means full"""
    if spec is None:
        return None
    text = str(spec).strip()
    if text in ("", "full"):
        return None
    if text == "H":
        return mesh.m
    if text.endswith("h"):
        factor = text[:-1] or "1"
        try:
            width = int(factor)
        except ValueError as e:
            raise ConfigurationError(f"Slab width {spec!r} is not an integer multiple of h") from e
    else:
        try:
            ratio = float(text) / mesh.h
        except ValueError as e:
            raise ConfigurationError(f"Unrecognized slab width {spec!r}") from e
        width = int(round(ratio))
        if abs(ratio - width) > 1e-9 * max(1.0, ratio):
            raise ConfigurationError(f"Slab width {spec} is not a multiple of h = {mesh.h}")
    if width < 1:
        raise ConfigurationError(f"Slab width must be positive, got {spec!r}")
    return min(width, mesh.m)
