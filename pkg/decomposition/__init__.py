from decomposition.classes import ClassKind, EquivalenceClass, InterfaceMaps, class_counts, class_report, classify_interface
from decomposition.jump import JumpOperator, build_jump_operator, build_scaled_jump

__all__ = [
    "ClassKind",
    "EquivalenceClass",
    "InterfaceMaps",
    "JumpOperator",
    "build_jump_operator",
    "build_scaled_jump",
    "class_counts",
    "class_report",
    "classify_interface",
]
