"""Equivalence classes of interface nodes and the subdomain restriction maps"""

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Tuple

import numpy as np

from errors import ClassificationError
from grid.mesh import StructuredMesh
from logger import LOGGER


class ClassKind(str, Enum):
    VERTEX = "vertex"
    EDGE = "edge"
    FACE = "face"


@dataclass
class EquivalenceClass:
    id: int
    kind: ClassKind
    sharing: Tuple[int, ...]
    nodes: np.ndarray
    # subdomain -> positions of `nodes` within that subdomain's interface node list
    local: Dict[int, np.ndarray] = field(default_factory=dict)
    # positions of `nodes` within the global interface node list
    positions: np.ndarray = None

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def multiplicity(self) -> int:
        return len(self.sharing)

    @property
    def pairs(self) -> List[Tuple[int, int]]:
        return list(itertools.combinations(self.sharing, 2))

    @property
    def is_primal_vertex(self) -> bool:
        return self.kind == ClassKind.VERTEX

    def to_dict(self) -> dict:
        return {"id": self.id, "kind": self.kind.value, "sharing": list(self.sharing), "dofs": self.size}


@dataclass
class InterfaceMaps:
    """Restriction maps between the assembled interface and the subdomain interfaces.

    The global interface is the sorted list of interface node ids; every index array below
    refers to positions in it or in a subdomain's sorted interface node list.
    """

    interface_nodes: np.ndarray
    class_of: np.ndarray
    restriction: Dict[int, np.ndarray]
    vertex_positions: np.ndarray
    # per subdomain: local interface positions of vertex dofs and of dual dofs
    primal_local: Dict[int, np.ndarray]
    dual_local: Dict[int, np.ndarray]
    dual_offsets: Dict[int, int]

    @property
    def num_interface(self) -> int:
        return len(self.interface_nodes)

    @property
    def num_dual(self) -> int:
        return sum(len(d) for d in self.dual_local.values())

    @property
    def subdomains(self) -> List[int]:
        return sorted(self.restriction)

    def restrict(self, i: int, w: np.ndarray) -> np.ndarray:
        return w[self.restriction[i]]

    def extend_add(self, i: int, w_local: np.ndarray, out: np.ndarray) -> np.ndarray:
        np.add.at(out, self.restriction[i], w_local)
        return out

    def multiplicity(self) -> np.ndarray:
        counts = np.zeros(self.num_interface)
        for i in self.subdomains:
            counts[self.restriction[i]] += 1
        return counts


def _sharing_set(mesh: StructuredMesh, coords: np.ndarray) -> Tuple[Tuple[int, ...], int]:
    per_axis, on_planes = [], 0
    for c in coords:
        if c % mesh.m == 0:
            per_axis.append((c // mesh.m - 1, c // mesh.m))
            on_planes += 1
        else:
            per_axis.append((c // mesh.m,))
    ids = sorted(mesh.subdomain_id(pos) for pos in itertools.product(*per_axis))
    return tuple(ids), on_planes


def _kind(mesh: StructuredMesh, on_planes: int, nodes: np.ndarray, sharing: Tuple[int, ...]) -> ClassKind:
    if on_planes == 1:
        kind = ClassKind.FACE
    elif on_planes == 2 and mesh.dim == 3:
        kind = ClassKind.EDGE
    else:
        kind = ClassKind.VERTEX

    # the class extends along at most dim - on_planes axes (a one-dof face spans none) and has 2^on_planes sharers
    coords = mesh.node_coords(nodes)
    spanned = int(np.sum(coords.max(axis=0) > coords.min(axis=0)))
    if len(sharing) != 2**on_planes or spanned > mesh.dim - on_planes:
        raise ClassificationError(f"Class shared by {sharing} spans {spanned} axes, inconsistent with a {kind.value}")
    if kind == ClassKind.VERTEX and len(nodes) != 1:
        raise ClassificationError(f"Vertex class shared by {sharing} has {len(nodes)} dofs")
    return kind


def classify_interface(mesh: StructuredMesh) -> Tuple[List[EquivalenceClass], InterfaceMaps]:
    """Group interface nodes by the set of subdomains sharing them"""
    subdomain_interfaces = {i: mesh.subdomain_interface_nodes(i) for i in range(mesh.num_subdomains)}
    interface_nodes = np.unique(np.concatenate(list(subdomain_interfaces.values())))

    groups: Dict[Tuple[int, ...], List[int]] = {}
    planes: Dict[Tuple[int, ...], int] = {}
    for node, coords in zip(interface_nodes, mesh.node_coords(interface_nodes)):
        sharing, on_planes = _sharing_set(mesh, coords)
        groups.setdefault(sharing, []).append(int(node))
        planes[sharing] = on_planes

    classes: List[EquivalenceClass] = []
    class_of = np.empty(len(interface_nodes), dtype=np.int64)
    for cid, sharing in enumerate(sorted(groups)):
        nodes = np.array(sorted(groups[sharing]), dtype=np.int64)
        kind = _kind(mesh, planes[sharing], nodes, sharing)
        positions = np.searchsorted(interface_nodes, nodes)
        local = {l: np.searchsorted(subdomain_interfaces[l], nodes) for l in sharing}
        for l in sharing:
            if not np.array_equal(subdomain_interfaces[l][local[l]], nodes):
                raise ClassificationError(f"Class {cid} nodes missing from the interface of subdomain {l}")
        class_of[positions] = cid
        classes.append(EquivalenceClass(id=cid, kind=kind, sharing=sharing, nodes=nodes, local=local, positions=positions))

    restriction = {i: np.searchsorted(interface_nodes, nodes) for i, nodes in subdomain_interfaces.items()}
    vertex_positions = np.sort(np.concatenate([c.positions for c in classes if c.is_primal_vertex] or [np.zeros(0, np.int64)]))

    primal_local, dual_local, dual_offsets, offset = {}, {}, {}, 0
    for i in sorted(restriction):
        is_vertex = np.isin(restriction[i], vertex_positions)
        primal_local[i] = np.flatnonzero(is_vertex)
        dual_local[i] = np.flatnonzero(~is_vertex)
        dual_offsets[i] = offset
        offset += len(dual_local[i])

    maps = InterfaceMaps(
        interface_nodes=interface_nodes,
        class_of=class_of,
        restriction=restriction,
        vertex_positions=vertex_positions,
        primal_local=primal_local,
        dual_local=dual_local,
        dual_offsets=dual_offsets,
    )

    counts = {kind.value: sum(1 for c in classes if c.kind == kind) for kind in ClassKind}
    LOGGER.info(f"Classified {len(interface_nodes)} interface dofs: {counts}")
    for c in classes:
        if c.kind == ClassKind.EDGE and c.multiplicity != 3:
            LOGGER.debug(f"Edge {c.id} is shared by {c.multiplicity} subdomains")
    return classes, maps


def class_report(classes: List[EquivalenceClass]) -> List[dict]:
    return [{"kind": c.kind.value, "multiplicity": c.multiplicity, "dofs": c.size, "id": c.id} for c in classes]


def class_counts(classes: List[EquivalenceClass]) -> Dict[str, int]:
    return {kind.value: sum(1 for c in classes if c.kind == kind) for kind in ClassKind}
