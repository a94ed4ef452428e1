"""Bernstein-Durrmeyer type operators: exact moments, numerics and error studies."""

from .analysis import bound_check, convergence_study, estimate_B_constant, voronovskaya_scan
from .functions import REGISTRY, FunctionSpec, get_function
from .moments import central_moment, component_monomial, operator_monomial, run_errata
from .operators import KINDS, ConstraintError, NegativeBaseError, OperatorSpec, SequencePair, apply, apply_grid

__all__ = [
    "KINDS",
    "REGISTRY",
    "ConstraintError",
    "FunctionSpec",
    "NegativeBaseError",
    "OperatorSpec",
    "SequencePair",
    "apply",
    "apply_grid",
    "bound_check",
    "central_moment",
    "component_monomial",
    "convergence_study",
    "estimate_B_constant",
    "get_function",
    "operator_monomial",
    "run_errata",
    "voronovskaya_scan",
]
