"""
Scaling matrices for the averaging operator.

Every class C shared by the subdomains I(C) gets one dense matrix D_C^(l) per sharing
subdomain, with sum_l D_C^(l) = I. Vertices always use multiplicity weights.
"""

from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional

import numpy as np
import scipy.linalg as sla

from context.manager import ContextManager
from decomposition.classes import EquivalenceClass
from errors import ConfigurationError
from linalg.dense import pseudo_inverse, symmetrize
from logger import LOGGER

MULTIPLICITY = "multiplicity"
DELUXE = "deluxe"


@dataclass
class TransformedScaling:
    """Scaling block in change-of-basis coordinates, split at the k primal coordinates"""

    matrix: np.ndarray
    k: int

    @property
    def pp(self) -> np.ndarray:
        return self.matrix[: self.k, : self.k]

    @property
    def pd(self) -> np.ndarray:
        return self.matrix[: self.k, self.k :]

    @property
    def dp(self) -> np.ndarray:
        return self.matrix[self.k :, : self.k]

    @property
    def dd(self) -> np.ndarray:
        return self.matrix[self.k :, self.k :]


@dataclass
class ScalingSet:
    kind: str
    blocks: Dict[int, Dict[int, np.ndarray]] = field(default_factory=dict)
    transformed: Dict[int, Dict[int, TransformedScaling]] = field(default_factory=dict)

    def has(self, class_id: int) -> bool:
        return class_id in self.blocks

    def block(self, class_id: int, l: int) -> np.ndarray:
        try:
            return self.blocks[class_id][l]
        except KeyError:
            raise ConfigurationError(f"No scaling for class {class_id} in subdomain {l}") from None

    def local(self, class_id: int, l: int) -> np.ndarray:
        """Block in the coordinates the solver works in (transformed when a change of basis exists)"""
        if class_id in self.transformed:
            return self.transformed[class_id][l].matrix
        return self.block(class_id, l)

    def partition_error(self, class_id: int) -> float:
        blocks = list(self.blocks[class_id].values())
        return float(np.max(np.abs(sum(blocks) - np.eye(blocks[0].shape[0])), initial=0.0))

    def check_partition_of_unity(self, tol: float = 1e-10) -> None:
        for class_id in self.blocks:
            err = self.partition_error(class_id)
            if err > tol:
                raise ConfigurationError(f"Scalings of class {class_id} violate the partition of unity by {err:.3e}")


def multiplicity_scaling(cls: EquivalenceClass) -> Dict[int, np.ndarray]:
    weight = 1.0 / cls.multiplicity
    return {l: weight * np.eye(cls.size) for l in cls.sharing}


def deluxe_scaling(cls: EquivalenceClass, blocks: Mapping[int, np.ndarray]) -> Dict[int, np.ndarray]:
    """D^(m) = (sum_l S_C^(l))^{-1} S_C^(m)"""
    total = symmetrize(sum(blocks[l] for l in cls.sharing))
    try:
        factor = sla.cho_factor(total, lower=True)
        return {l: sla.cho_solve(factor, blocks[l]) for l in cls.sharing}
    except sla.LinAlgError:
        message = f"Deluxe sum for class {cls.id} is singular; using its pseudo-inverse"
        LOGGER.warning(message)
        ContextManager.add_warning(message)

    # on the null space of the sum fall back to multiplicity weights, which keeps sum_l D = I
    total_pinv = pseudo_inverse(total)
    complement = (np.eye(cls.size) - total_pinv @ total) / cls.multiplicity
    return {l: total_pinv @ blocks[l] + complement for l in cls.sharing}


def transformed_scaling(D: np.ndarray, P: np.ndarray, k: int) -> TransformedScaling:
    """P^{-1} D P, the scaling expressed in the change-of-basis coordinates"""
    return TransformedScaling(matrix=np.linalg.solve(P, D @ P), k=k)


def transformed_deluxe(cls: EquivalenceClass, transformed_blocks: Mapping[int, np.ndarray], k: int) -> Dict[int, TransformedScaling]:
    """Deluxe scaling computed from the transformed blocks P^T S_C^(l) P, split at the k primal coordinates"""
    return {l: TransformedScaling(matrix=D, k=k) for l, D in deluxe_scaling(cls, transformed_blocks).items()}

def build_scaling_set(classes, kind: str, principal_blocks: Optional[Mapping[int, Mapping[int, np.ndarray]]] = None) -> ScalingSet:
    """Scalings for every class; deluxe needs `principal_blocks[class_id][l]` = S_C^(l) for non-vertex classes"""
    if kind not in (MULTIPLICITY, DELUXE):
        raise ConfigurationError(f"Unknown scaling: {kind}")

    scalings = ScalingSet(kind=kind)
    for cls in classes:
        if cls.is_primal_vertex or kind == MULTIPLICITY:
            scalings.blocks[cls.id] = multiplicity_scaling(cls)
            continue
        if principal_blocks is None or cls.id not in principal_blocks:
            raise ConfigurationError(f"Deluxe scaling of class {cls.id} needs its principal Schur blocks")
        scalings.blocks[cls.id] = deluxe_scaling(cls, principal_blocks[cls.id])

    LOGGER.debug(f"Built {kind} scalings for {len(classes)} classes")
    return scalings
