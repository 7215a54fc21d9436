"""Exact computations with maximal framed representations over non-Archimedean real closed fields."""

from lamina.valued import (
    Alpha,
    ComplexScalar,
    Exponent,
    FieldParams,
    IndistinguishableFromZero,
    LaminaError,
    NonSquareLeadingCoefficient,
    ValuedScalar,
)

__all__ = [
    "Alpha",
    "ComplexScalar",
    "Exponent",
    "FieldParams",
    "IndistinguishableFromZero",
    "LaminaError",
    "NonSquareLeadingCoefficient",
    "ValuedScalar",
]
