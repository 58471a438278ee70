"""
Soluciones de referencia densas (oráculo) para A^{-1/2}b, A^{1/2}b y sign(A)b.

Hermitianas: descomposición espectral. Generales: Schur + Parlett, o
autovectores cuando la matriz es diagonalizable y la raíz pasa por un
autovalor nulo (el caso singular semisimple).
"""

from typing import Optional, Union

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from src.config.settings import get_settings
from src.linalg.dense import (
    dense_inv_sqrtm_times,
    dense_sqrtm,
    is_hermitian,
    on_branch_cut,
)
from src.models.schemas import FunctionKind
from src.operators.linear_operator import LinearOperator, PlainOperator
from src.utils.errors import BranchCutViolation, SingularMatrix
from src.utils.logger import get_logger

logger = get_logger(__name__)

ZERO_TOL = 1e-12

MatrixInput = Union[LinearOperator, np.ndarray, sp.spmatrix]


def to_dense(A: MatrixInput) -> np.ndarray:
    """Matriz densa de un operador, una matriz dispersa o un array."""
    if isinstance(A, PlainOperator):
        A = A.matrix
    elif isinstance(A, LinearOperator):
        return A.detached().apply(np.eye(A.dim))
    if sp.issparse(A):
        return A.toarray()
    return np.asarray(A)


def _hermitian_solution(M: np.ndarray, b: np.ndarray, function: FunctionKind) -> np.ndarray:
    lam, U = scipy.linalg.eigh((M + M.conj().T) / 2)
    scale = float(np.abs(lam).max())
    proj = U.conj().T @ b

    if function == FunctionKind.INVSQRT:
        bad = on_branch_cut(lam, scale)
        if np.any(bad):
            raise BranchCutViolation(f"autovalor sobre (−∞, 0]: {lam[bad][0]:.6g}")
        weights = 1.0 / np.sqrt(lam)
    elif function == FunctionKind.SQRT:
        if lam.min() < -ZERO_TOL * scale:
            raise BranchCutViolation(f"autovalor negativo: {lam.min():.6g}")
        weights = np.sqrt(np.clip(lam, 0.0, None))
    else:
        if np.abs(lam).min() <= ZERO_TOL * scale:
            raise SingularMatrix("sign(A) no está definido con autovalores nulos")
        weights = np.sign(lam)

    return U @ (weights * proj)


def _eig_solution(M: np.ndarray, b: np.ndarray, function: FunctionKind) -> np.ndarray:
    lam, X = scipy.linalg.eig(M)
    coeffs = scipy.linalg.solve(X, b.astype(complex))
    scale = float(np.abs(lam).max())
    root = np.sqrt(lam.astype(complex))
    nonzero = np.abs(lam) > ZERO_TOL * scale

    if function == FunctionKind.SQRT:
        weights = np.where(nonzero, root, 0.0)
    elif function == FunctionKind.INVSQRT:
        if not np.all(nonzero):
            raise SingularMatrix("A singular: A^{-1/2} no existe")
        weights = 1.0 / root
    else:
        if not np.all(nonzero):
            raise SingularMatrix("sign(A) no está definido con autovalores nulos")
        weights = lam / np.sqrt((lam ** 2).astype(complex))
    return X @ (weights * coeffs)


def reference_solution(
    A: MatrixInput,
    b: np.ndarray,
    function: Union[str, FunctionKind],
    method: str = "auto",
    dense_limit: Optional[int] = None
) -> np.ndarray:
    """
    f(A)·b denso.

    Args:
        A: matriz u operador (n ≤ dense_limit)
        b: vector
        function: invsqrt | sqrt | sign
        method: auto | schur | eig ("auto": autovalores si A es hermitiana;
            si no Schur, salvo sqrt con autovalor ≈ 0, que va por eig)
        dense_limit: None → Settings.DENSE_LIMIT

    Returns:
        Vector real si A y b son reales

    Raises:
        ValueError: n > dense_limit o method desconocido
        BranchCutViolation, ZeroDiagonalPair, SingularMatrix: de los núcleos densos

    Example:
        >>> reference_solution(np.diag([4.0, 4.0]), np.ones(2), "sqrt")
        array([2., 2.])
    """
    function = FunctionKind(function)
    dense_limit = get_settings().DENSE_LIMIT if dense_limit is None else dense_limit
    M = to_dense(A)
    b = np.asarray(b)
    n = M.shape[0]
    if n > dense_limit:
        raise ValueError(f"n = {n} supera el límite denso ({dense_limit})")
    if method not in ("auto", "schur", "eig"):
        raise ValueError(f"method desconocido: {method}")
    real_input = not np.iscomplexobj(M) and not np.iscomplexobj(b)

    if method == "auto" and is_hermitian(M):
        result = _hermitian_solution(M, b, function)
    else:
        if method == "auto":
            method = "schur"
            if function == FunctionKind.SQRT:
                lam = scipy.linalg.eigvals(M)
                if np.abs(lam).min() <= ZERO_TOL * float(np.abs(lam).max()):
                    method = "eig"

        if method == "eig":
            result = _eig_solution(M, b, function)
        elif function == FunctionKind.INVSQRT:
            result = dense_inv_sqrtm_times(M, b)
        elif function == FunctionKind.SQRT:
            result = dense_sqrtm(M) @ b
        else:
            result = M @ dense_inv_sqrtm_times(M @ M, b)

    if real_input and np.iscomplexobj(result):
        result = result.real.copy()
    logger.debug("solución de referencia", function=function.value, n=n, method=method)
    return result


__all__ = ["reference_solution", "to_dense"]
