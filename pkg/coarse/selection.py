"""Eigenpair selection against a tolerance and the resulting primal constraints"""

from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg as sla

from errors import ConfigurationError
from linalg.dense import EigPair, eig_values

UPPER = "upper"
TWO_SIDED = "two_sided"


@dataclass
class EigSelection:
    class_id: int
    problem: str
    left: np.ndarray
    right: np.ndarray
    pairs: List[EigPair]
    null_basis: np.ndarray
    tolerance: Optional[float] = None
    rule: str = UPPER
    selected: List[int] = field(default_factory=list)

    @property
    def size(self) -> int:
        return self.left.shape[0]

    @property
    def k(self) -> int:
        return len(self.selected)

    @property
    def values(self) -> np.ndarray:
        return eig_values(self.pairs)

    @property
    def infinite_count(self) -> int:
        return int(np.sum(np.isinf(self.values)))

    @property
    def finite_values(self) -> np.ndarray:
        values = self.values
        return values[np.isfinite(values)]

    @property
    def selected_pairs(self) -> List[EigPair]:
        return [self.pairs[n] for n in self.selected]

    def constraints(self) -> np.ndarray:
        """Constraint functionals as columns: left v for A-normalized pairs, right v when left v = 0"""
        cols = [self.left @ p.vector if p.normalization == "A" else self.right @ p.vector for p in self.selected_pairs]
        return np.column_stack(cols) if cols else np.zeros((self.size, 0))

    def summary(self) -> dict:
        return {
            "class_id": self.class_id,
            "problem": self.problem,
            "dofs": self.size,
            "pairs": len(self.pairs),
            "infinite": self.infinite_count,
            "selected": self.k,
            "tolerance": self.tolerance,
            "rule": self.rule,
        }


def select_primal(selection: EigSelection, tolerance: float, rule: Optional[str] = None) -> EigSelection:
    """Select lambda >= tolerance (infinite pairs always); the two-sided rule also takes lambda <= 1/tolerance"""
    if not tolerance > 0:
        raise ConfigurationError(f"Selection tolerance must be positive, got {tolerance}")
    rule = rule or selection.rule
    values = selection.values
    chosen = values >= tolerance
    if rule == TWO_SIDED:
        chosen |= values <= 1.0 / tolerance
    elif rule != UPPER:
        raise ConfigurationError(f"Unknown selection rule: {rule}")
    return replace(selection, tolerance=float(tolerance), rule=rule, selected=[int(n) for n in np.flatnonzero(chosen)])


def coarse_component(selection: EigSelection, w: np.ndarray) -> np.ndarray:
    """Pi w = sum_n <A v_n, w> v_n over the selected A-normalized pairs"""
    out = np.zeros(selection.size)
    for p in selection.selected_pairs:
        if p.normalization == "A":
            out += (p.vector @ (selection.left @ w)) * p.vector
    return out


def lemma_sides(selection: EigSelection, form: np.ndarray, w_class: np.ndarray, energy: float) -> Tuple[float, float]:
    """(<form z, z>, tolerance * energy) with z = w - Pi w; the coarse space bound asks lhs <= rhs"""
    z = w_class - coarse_component(selection, w_class)
    return float(z @ (form @ z)), float(selection.tolerance * energy)


def orthonormal_constraints(C: np.ndarray, rel_tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of span(C), dropping numerically dependent columns"""
    if C.shape[1] == 0:
        return C
    return sla.orth(C, rcond=rel_tol)


@dataclass
class PrimalConstraintSet:
    """Adaptive primal constraints per class, as columns on the class dofs"""

    constraints: Dict[int, np.ndarray] = field(default_factory=dict)
    selections: Dict[int, List[EigSelection]] = field(default_factory=dict)
    pnum1: int = 0
    pnum2: int = 0
    pnumE: int = 0
    num_faces: int = 0
    num_edges: int = 0

    @property
    def counts(self) -> Dict[int, int]:
        return {cid: C.shape[1] for cid, C in self.constraints.items()}

    @property
    def pnum(self) -> int:
        return sum(self.counts.values())

    @property
    def p1(self) -> float:
        return self.pnum1 / self.num_faces if self.num_faces else 0.0

    @property
    def p2(self) -> float:
        return self.pnum2 / self.num_faces if self.num_faces else 0.0

    @property
    def pE(self) -> float:
        return self.pnumE / self.num_edges if self.num_edges else 0.0

    def count(self, class_id: int) -> int:
        C = self.constraints.get(class_id)
        return 0 if C is None else C.shape[1]
