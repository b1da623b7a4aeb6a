"""Assembling the adaptive coarse space: class blocks, eigenproblems, selection and change of basis"""

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional

import numpy as np

from coarse.change_of_basis import ChangeOfBasis, change_of_basis, change_of_basis_from_constraints, identity_basis
from coarse.gevp import edge_gevp, face_gevp, pairwise_face_gevps
from coarse.selection import EigSelection, PrimalConstraintSet, select_primal
from context.manager import ContextManager
from decomposition.classes import ClassKind, EquivalenceClass
from errors import ConfigurationError
from logger import LOGGER
from scaling.scalings import DELUXE, MULTIPLICITY, deluxe_scaling, multiplicity_scaling
from schur.complements import SchurOperator, class_block, class_schur
from schur.slab import slab_blocks
from workers import parallel_map

FACE_PROBLEMS = ("parallel_sum", "pairwise")


@dataclass
class ClassBlocks:
    class_id: int
    principal: Dict[int, np.ndarray]
    condensed: Dict[int, np.ndarray]
    eta: Optional[int] = None


def class_blocks(cls: EquivalenceClass, schurs: Mapping[int, SchurOperator], eta: Optional[int] = None) -> ClassBlocks:
    """S_C^(l) and S~_C^(l) for every sharing subdomain, from the slab of width `eta` cells when given"""
    principal, condensed = {}, {}
    for l in cls.sharing:
        if eta is None:
            principal[l] = class_block(schurs[l], cls, l)
            condensed[l] = class_schur(schurs[l], cls, l)
        else:
            principal[l], condensed[l] = slab_blocks(schurs[l].system, cls, eta)
    return ClassBlocks(class_id=cls.id, principal=principal, condensed=condensed, eta=eta)


def principal_blocks(
    classes: List[EquivalenceClass], schurs: Mapping[int, SchurOperator], eta: Optional[int] = None
) -> Dict[int, Dict[int, np.ndarray]]:
    """S_C^(l) of every face and edge, from the slab of width `eta` cells when given"""
    if eta is None:
        return {c.id: {l: class_block(schurs[l], c, l) for l in c.sharing} for c in classes if not c.is_primal_vertex}
    return {c.id: {l: slab_blocks(schurs[l].system, c, eta)[0] for l in c.sharing} for c in classes if not c.is_primal_vertex}


@dataclass
class ClassSelection:
    """Everything the coarse space keeps for one class"""

    cls: EquivalenceClass
    selections: List[EigSelection]
    constraints: np.ndarray
    basis: ChangeOfBasis

    def records(self) -> List[dict]:
        base = {"kind": self.cls.kind.value, "multiplicity": self.cls.multiplicity}
        return [{**base, **s.summary()} for s in self.selections]


@dataclass
class AdaptiveCoarseSpace:
    constraints: PrimalConstraintSet
    bases: Dict[int, ChangeOfBasis] = field(default_factory=dict)
    classes: Dict[int, ClassSelection] = field(default_factory=dict)

    @property
    def pnum(self) -> int:
        return self.constraints.pnum

    def records(self) -> List[dict]:
        return [r for cid in sorted(self.classes) for r in self.classes[cid].records()]


def empty_coarse_space(classes: List[EquivalenceClass]) -> AdaptiveCoarseSpace:
    faces = sum(1 for c in classes if c.kind == ClassKind.FACE)
    edges = sum(1 for c in classes if c.kind == ClassKind.EDGE)
    constraints = PrimalConstraintSet(num_faces=faces, num_edges=edges)
    bases = {c.id: identity_basis(c.id, c.size) for c in classes if not c.is_primal_vertex}
    return AdaptiveCoarseSpace(constraints=constraints, bases=bases)


def _gevp_scaling(cls: EquivalenceClass, blocks: ClassBlocks, scaling: str) -> Dict[int, np.ndarray]:
    if scaling == MULTIPLICITY:
        return multiplicity_scaling(cls)
    if scaling == DELUXE:
        return deluxe_scaling(cls, blocks.principal)
    raise ConfigurationError(f"Unknown scaling: {scaling}")


def class_eigenproblems(cls: EquivalenceClass, blocks: ClassBlocks, face_problem: Optional[str], scaling: str) -> List[EigSelection]:
    """The unselected eigenproblems of one face or edge"""
    P, St = blocks.principal, blocks.condensed
    if cls.kind == ClassKind.EDGE:
        return [edge_gevp(cls, P, St, _gevp_scaling(cls, blocks, scaling))]
    i, j = cls.sharing
    if face_problem == "pairwise":
        return list(pairwise_face_gevps(St[i], St[j], P[i], P[j], class_id=cls.id))
    D = _gevp_scaling(cls, blocks, scaling)
    return [face_gevp(P[i], P[j], St[i], St[j], D[i], D[j], class_id=cls.id)]


def _select_class(
    cls: EquivalenceClass,
    schurs: Mapping[int, SchurOperator],
    face_problem: Optional[str],
    edge_problem: bool,
    scaling: str,
    tol_face: float,
    tol_edge: Optional[float],
    eta: Optional[int],
) -> Optional[ClassSelection]:
    if cls.kind == ClassKind.FACE and face_problem is None:
        return None
    if cls.kind == ClassKind.EDGE and not edge_problem:
        return None

    problems = class_eigenproblems(cls, class_blocks(cls, schurs, eta), face_problem, scaling)
    tolerance = tol_edge if cls.kind == ClassKind.EDGE else tol_face
    selections = [select_primal(problem, tolerance) for problem in problems]

    if len(selections) == 1:
        basis = change_of_basis(selections[0])
    else:
        basis = change_of_basis_from_constraints(cls.id, np.hstack([s.constraints() for s in selections]))
    constraints = basis.matrix[:, : basis.k] if basis.kind != "eigen" else selections[0].constraints()
    return ClassSelection(cls=cls, selections=selections, constraints=constraints, basis=basis)


def build_adaptive_coarse_space(
    classes: List[EquivalenceClass],
    schurs: Mapping[int, SchurOperator],
    *,
    face_problem: Optional[str],
    edge_problem: bool,
    scaling: str,
    tol_face: float,
    tol_edge: Optional[float] = None,
    eta: Optional[int] = None,
) -> AdaptiveCoarseSpace:
    """Solve the class eigenproblems and keep the selected constraints with their bases.

    `face_problem` is "parallel_sum" (parallel-sum problem), "pairwise" (both two-subdomain
    problems) or None; edges get the parallel-sum edge problem when `edge_problem` is set.
    With `eta` the eigenproblems use slab blocks of that width; deluxe scalings for the
    solver must then come from the same slab blocks (principal_blocks with the same `eta`).
    """
    if face_problem is not None and face_problem not in FACE_PROBLEMS:
        raise ConfigurationError(f"Unknown face eigenproblem: {face_problem}")
    if edge_problem and tol_edge is None:
        raise ConfigurationError("An edge tolerance is required for the edge eigenproblem")

    space = empty_coarse_space(classes)
    if edge_problem and any(c.kind == ClassKind.EDGE and c.multiplicity != 3 for c in classes):
        message = "Edge eigenproblems and scalings generalized to edges shared by more than three subdomains"
        LOGGER.info(message)
        ContextManager.add_warning(message)
    if face_problem == "pairwise":
        ContextManager.add_warning("First-type face eigenproblem uses the two-sided rule lambda >= tol or lambda <= 1/tol")

    candidates = [c for c in classes if not c.is_primal_vertex]
    results = parallel_map(
        lambda c: _select_class(c, schurs, face_problem, edge_problem, scaling, tol_face, tol_edge, eta), candidates
    )

    for result in results:
        if result is None:
            continue
        cid = result.cls.id
        space.classes[cid] = result
        space.bases[cid] = result.basis
        space.constraints.constraints[cid] = result.constraints
        space.constraints.selections[cid] = result.selections
        if result.cls.kind == ClassKind.EDGE:
            space.constraints.pnumE += result.selections[0].k
        elif face_problem == "pairwise":
            space.constraints.pnum1 += result.selections[0].k
            space.constraints.pnum2 += result.selections[1].k
        else:
            space.constraints.pnum2 += result.selections[0].k

    for record in space.records():
        ContextManager.record_selection(record)
    c = space.constraints
    LOGGER.info(f"Adaptive coarse space: pnum1={c.pnum1} pnum2={c.pnum2} pnumE={c.pnumE} (primal coordinates {c.pnum})")
    return space
