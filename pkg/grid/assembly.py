"""Conforming P1 assembly on the structured mesh"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
import scipy.sparse as sp

from errors import CoefficientError, MeshError
from grid.coefficients import CoefficientField
from grid.mesh import StructuredMesh, _cell_simplices


def element_stiffness(simplex_vertices: np.ndarray, rho: float) -> np.ndarray:
    """Stiffness matrix of rho * grad u . grad v on one simplex.

    `simplex_vertices` has shape (dim + 1, dim).
    """
    vertices = np.asarray(simplex_vertices, dtype=float)
    dim = vertices.shape[1]
    if vertices.shape != (dim + 1, dim):
        raise MeshError(f"A {dim}D simplex needs {dim + 1} vertices, got shape {vertices.shape}")
    if not rho > 0:
        raise CoefficientError(f"Coefficient must be positive, got {rho}")

    T = np.vstack([np.ones(dim + 1), vertices.T])
    det = np.linalg.det(T)
    scale = np.max(np.abs(vertices - vertices[0])) ** dim if dim else 1.0
    if scale == 0.0 or abs(det) <= 1e-12 * scale:
        raise MeshError("Degenerate simplex (zero volume)")

    # barycentric gradients are the spatial columns of T^{-1}
    grads = np.linalg.inv(T)[:, 1:]
    volume = abs(det) / math.factorial(dim)
    K = rho * volume * grads @ grads.T
    return 0.5 * (K + K.T)


@lru_cache(maxsize=None)
def _reference_cell(dim: int, m_total: int):
    """Cell stiffness (rho = 1) and per-corner load weight (f = 1) on a cell of size 1/m_total"""
    offsets = np.array([[(c >> a) & 1 for a in range(dim)] for c in range(2**dim)], dtype=float)
    h = 1.0 / m_total
    K = np.zeros((2**dim, 2**dim))
    load = np.zeros(2**dim)
    for simplex in _cell_simplices(dim):
        idx = list(simplex)
        K[np.ix_(idx, idx)] += element_stiffness(offsets[idx] * h, 1.0)
        load[idx] += h**dim / math.factorial(dim) / (dim + 1)
    K.setflags(write=False)
    load.setflags(write=False)
    return K, load


def assemble_cells(mesh: StructuredMesh, cells: np.ndarray, coeff: CoefficientField, nodes: np.ndarray) -> sp.csr_matrix:
    """Sum of element matrices over `cells`, restricted to the sorted node list `nodes`.

    Rows and columns of nodes outside `nodes` (Dirichlet nodes, nodes of a cut) are dropped.
    """
    K_ref, _ = _reference_cell(mesh.dim, mesh.n)
    corners = mesh.cell_corner_nodes(cells)
    local = np.searchsorted(nodes, corners)
    local = np.minimum(local, len(nodes) - 1)
    present = nodes[local] == corners

    ncorner = corners.shape[1]
    rows = np.repeat(local, ncorner, axis=1).ravel()
    cols = np.tile(local, (1, ncorner)).ravel()
    keep = (np.repeat(present, ncorner, axis=1) & np.tile(present, (1, ncorner))).ravel()
    data = (coeff.values[cells][:, None, None] * K_ref[None, :, :]).reshape(len(cells), -1).ravel()

    A = sp.coo_matrix((data[keep], (rows[keep], cols[keep])), shape=(len(nodes), len(nodes)))
    return A.tocsr()


def assemble_load(mesh: StructuredMesh, cells: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    """Load vector of f = 1 from `cells` on the sorted node list `nodes`"""
    _, weights = _reference_cell(mesh.dim, mesh.n)
    corners = mesh.cell_corner_nodes(cells)
    local = np.minimum(np.searchsorted(nodes, corners), len(nodes) - 1)
    present = nodes[local] == corners
    values = np.broadcast_to(weights, corners.shape)
    return np.bincount(local[present], weights=values[present], minlength=len(nodes))


@dataclass
class LocalSystem:
    """Subdomain stiffness over the free nodes of a subdomain with its interior/interface split"""

    subdomain: int
    matrix: sp.csr_matrix
    nodes: np.ndarray
    interior: np.ndarray
    interface: np.ndarray
    load: np.ndarray
    mesh: Optional[StructuredMesh] = None
    coeff: Optional[CoefficientField] = None

    @property
    def interface_nodes(self) -> np.ndarray:
        return self.nodes[self.interface]

    @property
    def interior_nodes(self) -> np.ndarray:
        return self.nodes[self.interior]

    def block(self, rows: np.ndarray, cols: np.ndarray) -> sp.csr_matrix:
        return self.matrix[rows][:, cols]

    def energy(self, u_local: np.ndarray) -> float:
        return float(u_local @ (self.matrix @ u_local))


def assemble_subdomain(
    mesh: StructuredMesh, i: int, coeff: CoefficientField, cells: Optional[np.ndarray] = None
) -> LocalSystem:
    """Assemble A^(i); `cells` may reorder the subdomain's cells (the result does not depend on the order)"""
    nodes = mesh.subdomain_nodes(i)
    if cells is None:
        cells = mesh.subdomain_cells(i)
    A = assemble_cells(mesh, cells, coeff, nodes)

    lo, hi = mesh.subdomain_box(i)
    coords = mesh.node_coords(nodes)
    on_boundary = np.any((coords == lo) | (coords == hi), axis=-1)
    return LocalSystem(
        subdomain=i,
        matrix=A,
        nodes=nodes,
        interior=np.flatnonzero(~on_boundary),
        interface=np.flatnonzero(on_boundary),
        load=assemble_load(mesh, cells, nodes),
        mesh=mesh,
        coeff=coeff,
    )


def assemble_global(mesh: StructuredMesh, coeff: CoefficientField) -> sp.csr_matrix:
    cells = np.arange(mesh.num_cells, dtype=np.int64)
    return assemble_cells(mesh, cells, coeff, mesh.free_nodes)


def load_vector(mesh: StructuredMesh) -> np.ndarray:
    cells = np.arange(mesh.num_cells, dtype=np.int64)
    return assemble_load(mesh, cells, mesh.free_nodes)
