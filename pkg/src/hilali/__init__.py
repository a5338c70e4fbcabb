"""Exact rational homotopy computations for Sullivan models: cohomology,
elliptic invariants, the Hilali quotient h, and fibration inequalities."""

from .algebra import (
    DifferentialError,
    Generator,
    ModelError,
    ModelMismatchError,
    Polynomial,
    SullivanModel,
    apply_differential,
    check_d_squared,
    dimension_formula,
    monomial_basis,
    multiply,
)
from .cohomology import BettiTable, betti_number, betti_table, poincare_check, restriction_to_fiber
from .dsl import ParseError, format_model, parse_model
from .elliptic import (
    EllipticInvariants,
    NotEllipticError,
    class_predicates,
    ellipticity_check,
    f0_check_and_formula,
    invariants,
    linear_part_reduction,
    star_type_check,
)
from .fibration import FibrationModel, analyze_fibration, build_fibration, transgression_analysis

__all__ = [
    "BettiTable",
    "DifferentialError",
    "EllipticInvariants",
    "FibrationModel",
    "Generator",
    "ModelError",
    "ModelMismatchError",
    "NotEllipticError",
    "ParseError",
    "Polynomial",
    "SullivanModel",
    "analyze_fibration",
    "apply_differential",
    "betti_number",
    "betti_table",
    "build_fibration",
    "check_d_squared",
    "class_predicates",
    "dimension_formula",
    "ellipticity_check",
    "f0_check_and_formula",
    "format_model",
    "invariants",
    "linear_part_reduction",
    "monomial_basis",
    "multiply",
    "parse_model",
    "poincare_check",
    "restriction_to_fiber",
    "star_type_check",
    "transgression_analysis",
]
