"""
Operadores lineales instrumentados.

Cada operador cuenta los productos matriz-vector (mvms) con la matriz A y los
productos internos realizados sobre él. Los operadores compuestos (A², A − σI,
A·q(A)²) comparten los contadores del operador base, de modo que todas las
cuentas quedan expresadas en mvms con A.

Contrato de concurrencia: un operador con contadores pertenece a una sola
corrida; las matrices subyacentes son inmutables y se comparten.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import List, Optional, Protocol, Tuple, Union

import numpy as np
import scipy.sparse as sp

from src.linalg.dense import HERMITIAN_TOL, is_hermitian
from src.utils.errors import DimensionMismatch

MatrixLike = Union[np.ndarray, sp.spmatrix]


class OperatorKind(str, Enum):
    """Tipos de operador."""
    PLAIN = "plain"                    # A
    SQUARED = "squared"                # A², dos mvms por aplicación
    PRECONDITIONED = "preconditioned"  # A·q(A)², 2d − 1 aplicaciones del base
    SHIFTED = "shifted"                # A − σI


class PolynomialAction(Protocol):
    """Lo que un operador precondicionado necesita de un polinomio."""

    degree: int

    def apply(self, op: "LinearOperator", v: np.ndarray) -> np.ndarray: ...


@dataclass
class OperationCounters:
    """Contadores monótonos de una corrida."""
    mvms: int = 0
    inner_products: int = 0

    def snapshot(self) -> Tuple[int, int]:
        return self.mvms, self.inner_products


# ═══════════════════════════════════════════════════════════════════════════
# SPARSE MATRIX (CSR)
# ═══════════════════════════════════════════════════════════════════════════

def as_csr(matrix: MatrixLike) -> sp.csr_matrix:
    """
    Convierte a CSR canónica: duplicados sumados e índices de columna ordenados.

    Raises:
        ValueError: si la matriz no es cuadrada
    """
    A = sp.csr_matrix(matrix)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"la matriz debe ser cuadrada, shape={A.shape}")
    A.sum_duplicates()
    A.sort_indices()
    return A


def check_csr_invariants(A: sp.csr_matrix) -> bool:
    """row_ptr no decreciente, col_idx < n y estrictamente creciente por fila."""
    n = A.shape[0]
    indptr, indices = A.indptr, A.indices
    if indptr[0] != 0 or indptr[-1] != A.nnz or np.any(np.diff(indptr) < 0):
        return False
    if indices.size and (indices.min() < 0 or indices.max() >= n):
        return False
    for row in range(n):
        cols = indices[indptr[row]:indptr[row + 1]]
        if cols.size > 1 and np.any(np.diff(cols) <= 0):
            return False
    return True


# ═══════════════════════════════════════════════════════════════════════════
# OPERADORES
# ═══════════════════════════════════════════════════════════════════════════

class LinearOperator(ABC):
    """Capacidad abstracta "aplicar a un vector" con contadores."""

    kind: OperatorKind

    def __init__(self, dim: int, counters: OperationCounters):
        self.dim = dim
        self.counters = counters

    def apply(self, x: np.ndarray) -> np.ndarray:
        """
        Imagen del operador sobre x (vector o bloque de columnas).

        Raises:
            DimensionMismatch: si x.shape[0] != dim
        """
        x = np.asarray(x)
        if x.shape[0] != self.dim:
            raise DimensionMismatch(
                f"vector de longitud {x.shape[0]} para operador de dimensión {self.dim}"
            )
        return self._apply(x)

    @abstractmethod
    def _apply(self, x: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def detached(self) -> "LinearOperator":
        """Copia con contadores nuevos (para cálculos de oráculo que no cuentan)."""

    @property
    @abstractmethod
    def is_real(self) -> bool: ...

    @property
    def is_hermitian(self) -> bool:
        """A = A* (sólo lo saben los operadores que envuelven una matriz)."""
        return False

    def count_inner_products(self, k: int) -> None:
        self.counters.inner_products += k

    def shifted(self, sigma: complex) -> "ShiftedOperator":
        return ShiftedOperator(self, sigma)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim}, kind={self.kind.value})"


class PlainOperator(LinearOperator):
    """Envuelve A (CSR o densa): una mvm por columna aplicada."""

    kind = OperatorKind.PLAIN

    def __init__(self, matrix: MatrixLike, counters: Optional[OperationCounters] = None):
        if sp.issparse(matrix):
            matrix = as_csr(matrix)
        else:
            matrix = np.asarray(matrix)
            if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
                raise ValueError(f"la matriz debe ser cuadrada, shape={matrix.shape}")
        super().__init__(matrix.shape[0], counters or OperationCounters())
        self.matrix = matrix

    def _apply(self, x: np.ndarray) -> np.ndarray:
        self.counters.mvms += 1 if x.ndim == 1 else x.shape[1]
        return self.matrix @ x

    def detached(self) -> "PlainOperator":
        return PlainOperator(self.matrix)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.matrix)

    @cached_property
    def is_hermitian(self) -> bool:
        A = self.matrix
        if not sp.issparse(A):
            return is_hermitian(A)
        gap = abs(A - A.conj().T)
        scale = max(1.0, float(abs(A).max()))
        return (float(gap.max()) if gap.nnz else 0.0) <= HERMITIAN_TOL * scale


class SquaredOperator(LinearOperator):
    """A² como dos aplicaciones consecutivas del base (nunca se forma A²)."""

    kind = OperatorKind.SQUARED

    def __init__(self, base: LinearOperator):
        super().__init__(base.dim, base.counters)
        self.base = base

    def _apply(self, x: np.ndarray) -> np.ndarray:
        return self.base.apply(self.base.apply(x))

    def detached(self) -> "SquaredOperator":
        return SquaredOperator(self.base.detached())

    @property
    def is_real(self) -> bool:
        return self.base.is_real

    @property
    def is_hermitian(self) -> bool:
        return self.base.is_hermitian


class ShiftedOperator(LinearOperator):
    """A − σI."""

    kind = OperatorKind.SHIFTED

    def __init__(self, base: LinearOperator, sigma: complex):
        super().__init__(base.dim, base.counters)
        self.base = base
        self.sigma = sigma

    def _apply(self, x: np.ndarray) -> np.ndarray:
        y = self.base.apply(x)
        if self.sigma == 0:
            return y
        return y - self.sigma * x

    def detached(self) -> "ShiftedOperator":
        return ShiftedOperator(self.base.detached(), self.sigma)

    @property
    def is_real(self) -> bool:
        return self.base.is_real and np.imag(self.sigma) == 0

    @property
    def is_hermitian(self) -> bool:
        return self.base.is_hermitian and np.imag(self.sigma) == 0


class PreconditionedOperator(LinearOperator):
    """
    A·q(A)² aplicado en tres etapas, sin formar los coeficientes de q².

    order="left":  u ← A x,  y ← q(A) u,  w ← q(A) y
    order="right": y ← q(A) x,  u ← q(A) y,  w ← A u

    Con ``keep_intermediates`` (sólo right) se guarda cada y = q(A)x en
    ``intermediates``, en el orden de aplicación.
    """

    kind = OperatorKind.PRECONDITIONED

    def __init__(
        self,
        base: LinearOperator,
        poly: PolynomialAction,
        order: str = "left",
        keep_intermediates: bool = False
    ):
        if order not in ("left", "right"):
            raise ValueError(f"order debe ser 'left' o 'right', no {order!r}")
        if keep_intermediates and order != "right":
            raise ValueError("keep_intermediates sólo tiene sentido con order='right'")
        super().__init__(base.dim, base.counters)
        self.base = base
        self.poly = poly
        self.order = order
        self.keep_intermediates = keep_intermediates
        self.intermediates: List[np.ndarray] = []

    @property
    def applications_per_call(self) -> int:
        """2d − 1 aplicaciones del operador base (d − 1 = grado de q)."""
        return 2 * self.poly.degree + 1

    def _apply(self, x: np.ndarray) -> np.ndarray:
        if self.order == "left":
            u = self.base.apply(x)
            y = self.poly.apply(self.base, u)
            return self.poly.apply(self.base, y)

        y = self.poly.apply(self.base, x)
        if self.keep_intermediates:
            self.intermediates.append(y)
        u = self.poly.apply(self.base, y)
        return self.base.apply(u)

    def detached(self) -> "PreconditionedOperator":
        return PreconditionedOperator(self.base.detached(), self.poly, self.order)

    @property
    def is_real(self) -> bool:
        return self.base.is_real and getattr(self.poly, "is_real", False)


__all__ = [
    "OperatorKind",
    "OperationCounters",
    "LinearOperator",
    "PlainOperator",
    "SquaredOperator",
    "ShiftedOperator",
    "PreconditionedOperator",
    "as_csr",
    "check_csr_invariants",
]
