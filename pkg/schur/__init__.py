from schur.complements import SchurOperator, class_block, class_schur, condense, schur_interface
from schur.slab import parse_eta, slab_blocks

__all__ = ["SchurOperator", "class_block", "class_schur", "condense", "parse_eta", "schur_interface", "slab_blocks"]
