"""
Funciones de matrices por Arnoldi con precondicionamiento polinomial.
"""

from src.funm.condition import EPSILON_LIMIT, condition_analysis, kappa_bound, relative_error
from src.funm.drivers import (
    InvSqrtIteration,
    invsqrt_left_prec,
    invsqrt_plain,
    invsqrt_right_prec,
    sign_action,
    sqrt_action,
)
from src.funm.reference import reference_solution, to_dense
from src.funm.solver import compute_action

__all__ = [
    # Drivers
    "InvSqrtIteration",
    "invsqrt_left_prec",
    "invsqrt_right_prec",
    "invsqrt_plain",
    "sqrt_action",
    "sign_action",
    "compute_action",
    # Análisis
    "condition_analysis",
    "kappa_bound",
    "relative_error",
    "EPSILON_LIMIT",
    # Oráculo
    "reference_solution",
    "to_dense",
]
