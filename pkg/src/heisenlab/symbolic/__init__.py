from .ccr import (
    DiracReport,
    classical_symbol,
    dirac_check,
    normal_order,
    poisson,
    quantize,
    random_pairs,
    random_polynomial,
    realization_cut,
    realize,
    sym_commutator,
)
from .parser import ParseError, parse
from .polynomial import CommutativePolynomial, OperatorPolynomial, coeff, to_complex

__all__ = [
    "CommutativePolynomial",
    "DiracReport",
    "OperatorPolynomial",
    "ParseError",
    "classical_symbol",
    "coeff",
    "dirac_check",
    "normal_order",
    "parse",
    "poisson",
    "quantize",
    "random_pairs",
    "random_polynomial",
    "realization_cut",
    "realize",
    "sym_commutator",
    "to_complex",
]
