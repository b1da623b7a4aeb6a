from typing import List, Optional

from decomposition.classes import ClassKind, EquivalenceClass


def bound_constant(classes: List[EquivalenceClass]) -> float:
    """C = 8 max(max_i N_F(i)^2, max_i N_E(i)^2 * max_E |I(E)|)"""
    faces, edges = {}, {}
    for c in classes:
        counts = faces if c.kind == ClassKind.FACE else edges if c.kind == ClassKind.EDGE else None
        if counts is None:
            continue
        for i in c.sharing:
            counts[i] = counts.get(i, 0) + 1

    face_term = max(faces.values(), default=0) ** 2
    max_sharing = max((c.multiplicity for c in classes if c.kind == ClassKind.EDGE), default=0)
    edge_term = max(edges.values(), default=0) ** 2 * max_sharing
    return 8.0 * max(face_term, edge_term)


def bound_value(classes: List[EquivalenceClass], tolerance: Optional[float]) -> Optional[float]:
    if tolerance is None:
        return None
    return bound_constant(classes) * tolerance
