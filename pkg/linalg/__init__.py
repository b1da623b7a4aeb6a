from linalg.dense import (
    EigPair,
    form_gap,
    form_leq,
    generalized_eig,
    generalized_eig_with_null,
    joint_null_basis,
    parallel_sum,
    parallel_sum_fold,
    pseudo_inverse,
)

__all__ = [
    "EigPair",
    "form_gap",
    "form_leq",
    "generalized_eig",
    "generalized_eig_with_null",
    "joint_null_basis",
    "parallel_sum",
    "parallel_sum_fold",
    "pseudo_inverse",
]
