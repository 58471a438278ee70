"""
Módulo de operadores.

Matrices dispersas CSR, operadores lineales instrumentados (A, A², A − σI,
A·q(A)²), generadores de problemas modelo e ingesta Matrix Market.
"""

from src.operators.linear_operator import (
    OperatorKind,
    OperationCounters,
    LinearOperator,
    PlainOperator,
    SquaredOperator,
    ShiftedOperator,
    PreconditionedOperator,
    as_csr,
    check_csr_invariants,
)
from src.operators.model_problems import (
    make_laplace,
    laplace_spectral_interval,
    make_graph_laplacian,
    make_random_digraph,
    make_synthetic_nonhermitian,
    make_model_problem,
    make_rhs,
    random_unit_vector,
)
from src.operators.matrix_market import read_matrix_market, write_matrix_market

__all__ = [
    # Operadores
    "OperatorKind",
    "OperationCounters",
    "LinearOperator",
    "PlainOperator",
    "SquaredOperator",
    "ShiftedOperator",
    "PreconditionedOperator",
    "as_csr",
    "check_csr_invariants",
    # Problemas modelo
    "make_laplace",
    "laplace_spectral_interval",
    "make_graph_laplacian",
    "make_random_digraph",
    "make_synthetic_nonhermitian",
    "make_model_problem",
    "make_rhs",
    "random_unit_vector",
    # Matrix Market
    "read_matrix_market",
    "write_matrix_market",
]
