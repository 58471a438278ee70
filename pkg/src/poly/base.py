"""
Interfaz común de los polinomios precondicionadores q ≈ z^{-1/2}.
"""

from abc import ABC, abstractmethod

import numpy as np

from src.models.schemas import PolyKind
from src.operators.linear_operator import LinearOperator


class PrecondPoly(ABC):
    """
    Polinomio q de grado d − 1 en alguna representación.

    Toda representación evalúa q en escalares (``evaluate``) y aplica q(A) a
    un vector con exactamente ``degree`` aplicaciones del operador (``apply``).
    """

    kind: PolyKind

    @property
    @abstractmethod
    def degree(self) -> int: ...

    @property
    def d(self) -> int:
        """Grado + 1."""
        return self.degree + 1

    @property
    @abstractmethod
    def is_real(self) -> bool:
        """q tiene coeficientes reales (q(A)v es real si A y v lo son)."""

    @abstractmethod
    def evaluate(self, z) -> np.ndarray:
        """q(z) punto a punto."""

    @abstractmethod
    def apply(self, op: LinearOperator, v: np.ndarray) -> np.ndarray:
        """q(A)·v."""

    @abstractmethod
    def certification_sample(self, n_points: int = 1000) -> np.ndarray:
        """Puntos en los que se certifica la rama."""

    def _realify(self, op: LinearOperator, v: np.ndarray, w: np.ndarray) -> np.ndarray:
        if self.is_real and op.is_real and not np.iscomplexobj(v) and np.iscomplexobj(w):
            return w.real.copy()
        return w


__all__ = ["PrecondPoly"]
