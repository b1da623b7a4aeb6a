from coarse.change_of_basis import ChangeOfBasis, change_of_basis, change_of_basis_from_constraints, identity_basis
from coarse.gevp import edge_gevp, edge_local_form, face_gevp, pairwise_face_gevps
from coarse.selection import EigSelection, PrimalConstraintSet, coarse_component, lemma_sides, select_primal
from coarse.space import AdaptiveCoarseSpace, build_adaptive_coarse_space, class_blocks, class_eigenproblems, principal_blocks

__all__ = [
    "AdaptiveCoarseSpace",
    "ChangeOfBasis",
    "EigSelection",
    "PrimalConstraintSet",
    "build_adaptive_coarse_space",
    "change_of_basis",
    "change_of_basis_from_constraints",
    "class_blocks",
    "class_eigenproblems",
    "coarse_component",
    "edge_gevp",
    "edge_local_form",
    "face_gevp",
    "identity_basis",
    "pairwise_face_gevps",
    "lemma_sides",
    "principal_blocks",
    "select_primal",
]
