from scaling.scalings import (
    DELUXE,
    MULTIPLICITY,
    ScalingSet,
    TransformedScaling,
    build_scaling_set,
    deluxe_scaling,
    multiplicity_scaling,
    transformed_deluxe,
    transformed_scaling,
)

__all__ = [
    "DELUXE",
    "MULTIPLICITY",
    "ScalingSet",
    "TransformedScaling",
    "build_scaling_set",
    "deluxe_scaling",
    "multiplicity_scaling",
    "transformed_deluxe",
    "transformed_scaling",
]
