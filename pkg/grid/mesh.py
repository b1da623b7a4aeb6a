"""Structured simplicial meshes of the unit square and cube"""

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import List, Tuple

import numpy as np

from errors import MeshError
from logger import LOGGER


def _cell_simplices(dim: int) -> List[Tuple[int, ...]]:
    """Simplices of the unit cell as corner indices (bit a of a corner index is its offset along axis a)"""
    if dim == 2:
        # v00, v10, v11 and v00, v11, v01
        return [(0, 1, 3), (0, 3, 2)]
    simplices = []
    for perm in itertools.permutations(range(dim)):
        corner, path = 0, [0]
        for axis in perm:
            corner |= 1 << axis
            path.append(corner)
        simplices.append(tuple(path))
    return simplices


@dataclass(frozen=True)
class StructuredMesh:
    """Uniform mesh of [0,1]^dim with N subdomains and m cells per subdomain in every direction.

    Nodes and cells are numbered lexicographically with the x index running fastest.
    Subdomain ids follow the same convention on the N^dim subdomain lattice.
    """

    dim: int
    N: int
    m: int

    @property
    def n(self) -> int:
        return self.N * self.m

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def H(self) -> float:
        return 1.0 / self.N

    @property
    def num_nodes(self) -> int:
        return (self.n + 1) ** self.dim

    @property
    def num_cells(self) -> int:
        return self.n**self.dim

    @property
    def num_subdomains(self) -> int:
        return self.N**self.dim

    @cached_property
    def simplices(self) -> List[Tuple[int, ...]]:
        return _cell_simplices(self.dim)

    @cached_property
    def corner_offsets(self) -> np.ndarray:
        """Lattice offset of each of the 2^dim cell corners, shape (2^dim, dim)"""
        return np.array([[(c >> a) & 1 for a in range(self.dim)] for c in range(2**self.dim)], dtype=np.int64)

    # --- Index maps ---

    def node_ids(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64)
        strides = (self.n + 1) ** np.arange(self.dim)
        return coords @ strides

    def node_coords(self, ids: np.ndarray) -> np.ndarray:
        ids = np.asarray(ids, dtype=np.int64)
        return np.stack([(ids // (self.n + 1) ** a) % (self.n + 1) for a in range(self.dim)], axis=-1)

    def cell_ids(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64)
        strides = self.n ** np.arange(self.dim)
        return coords @ strides

    def cell_coords(self, ids: np.ndarray) -> np.ndarray:
        ids = np.asarray(ids, dtype=np.int64)
        return np.stack([(ids // self.n**a) % self.n for a in range(self.dim)], axis=-1)

    def cell_corner_nodes(self, cells: np.ndarray) -> np.ndarray:
        """Global node ids of the 2^dim corners of each cell, shape (len(cells), 2^dim)"""
        coords = self.cell_coords(cells)
        return self.node_ids(coords[:, None, :] + self.corner_offsets[None, :, :])

    def is_dirichlet(self, ids: np.ndarray) -> np.ndarray:
        coords = self.node_coords(ids)
        return np.any((coords == 0) | (coords == self.n), axis=-1)

    # --- Subdomains ---

    def subdomain_position(self, i: int) -> np.ndarray:
        if not 0 <= i < self.num_subdomains:
            raise MeshError(f"Subdomain {i} out of range for {self.num_subdomains} subdomains")
        return np.array([(i // self.N**a) % self.N for a in range(self.dim)], dtype=np.int64)

    def subdomain_id(self, position) -> int:
        return int(np.dot(np.asarray(position, dtype=np.int64), self.N ** np.arange(self.dim)))

    def subdomain_box(self, i: int) -> Tuple[np.ndarray, np.ndarray]:
        """Lower and upper node lattice corners of subdomain i"""
        lo = self.subdomain_position(i) * self.m
        return lo, lo + self.m

    def subdomain_cells(self, i: int) -> np.ndarray:
        lo, _ = self.subdomain_box(i)
        local = np.stack(np.meshgrid(*[np.arange(self.m)] * self.dim, indexing="ij"), axis=-1).reshape(-1, self.dim)
        return np.sort(self.cell_ids(local + lo))

    def subdomain_nodes(self, i: int) -> np.ndarray:
        """All free (non-Dirichlet) nodes of the closed subdomain box, sorted"""
        lo, _ = self.subdomain_box(i)
        local = np.stack(np.meshgrid(*[np.arange(self.m + 1)] * self.dim, indexing="ij"), axis=-1).reshape(-1, self.dim)
        ids = np.sort(self.node_ids(local + lo))
        return ids[~self.is_dirichlet(ids)]

    def subdomain_interface_nodes(self, i: int) -> np.ndarray:
        nodes = self.subdomain_nodes(i)
        lo, hi = self.subdomain_box(i)
        coords = self.node_coords(nodes)
        on_boundary = np.any((coords == lo) | (coords == hi), axis=-1)
        return nodes[on_boundary]

    def touches_boundary(self, i: int) -> bool:
        lo, hi = self.subdomain_box(i)
        return bool(np.any(lo == 0) or np.any(hi == self.n))

    @cached_property
    def free_nodes(self) -> np.ndarray:
        ids = np.arange(self.num_nodes, dtype=np.int64)
        return ids[~self.is_dirichlet(ids)]


def build_mesh(dim: int, N: int, m: int) -> StructuredMesh:
    if dim not in (2, 3):
        raise MeshError(f"Dimension must be 2 or 3, got {dim}")
    if N < 2:
        raise MeshError(f"At least two subdomains per direction are needed, got N={N}")
    if m < 2:
        raise MeshError(f"At least two elements per subdomain direction are needed, got m={m}")

    mesh = StructuredMesh(dim=dim, N=N, m=m)
    LOGGER.debug(f"Built {dim}D mesh: {mesh.n}^{dim} cells, {mesh.num_subdomains} subdomains, h={mesh.h:.4g}")
    return mesh
