"""
Proceso de Lanczos (recurrencia de tres términos) y Lanczos de dos pasadas.

Para operadores hermitianos (afirmado por quien llama). Dos productos
internos por paso; la base se guarda sólo si se pide.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from src.config.settings import get_settings
from src.krylov.arnoldi import DEFLATION_TOL
from src.operators.linear_operator import LinearOperator
from src.utils.errors import ZeroStartVector
from src.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class TridiagonalDecomposition:
    """
    Op·V = V·T + h_next·v_next·e_m*, con T = tridiag(offdiag, alpha, offdiag).

    V es None cuando la base no se guardó (modo dos pasadas).
    """
    alpha: np.ndarray
    offdiag: np.ndarray
    h_next: float
    v_next: Optional[np.ndarray]
    V: Optional[np.ndarray]
    beta: float

    @property
    def m(self) -> int:
        return self.alpha.shape[0]

    @property
    def breakdown(self) -> bool:
        return self.h_next == 0.0

    @property
    def H(self) -> np.ndarray:
        return np.diag(self.alpha) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


class LanczosProcess:
    """Lanczos incremental; ``current`` es el vector que expandirá el próximo paso."""

    def __init__(
        self,
        op: LinearOperator,
        start: np.ndarray,
        store_basis: bool = True,
        breakdown_tol: Optional[float] = None
    ):
        start = np.asarray(start)
        beta = float(np.linalg.norm(start))
        if beta == 0.0:
            raise ZeroStartVector("el vector inicial es nulo")

        self.op = op
        self.beta = beta
        self.store_basis = store_basis
        self.breakdown_tol = (
            breakdown_tol if breakdown_tol is not None else get_settings().BREAKDOWN_TOL
        )
        self.breakdown = False
        self.steps = 0
        self.current: np.ndarray = start / beta
        self._previous: Optional[np.ndarray] = None
        self._alpha: List[float] = []
        self._offdiag: List[float] = []
        self._basis: List[np.ndarray] = []

    @property
    def m(self) -> int:
        return len(self._alpha)

    def step(self) -> bool:
        """Un paso de la recurrencia. Devuelve True si hubo breakdown."""
        if self.breakdown:
            raise RuntimeError("el proceso de Lanczos ya terminó por breakdown")

        v = self.current
        w = self.op.apply(v)
        if self._previous is not None:
            w = w - self._offdiag[-1] * self._previous
        alpha = float(np.real(np.vdot(v, w)))
        w = w - alpha * v
        beta = float(np.linalg.norm(w))
        self.op.count_inner_products(2)

        if self.store_basis:
            self._basis.append(v)
        self._alpha.append(alpha)
        self._offdiag.append(beta)
        self.steps += 1

        scale = abs(alpha) + (self._offdiag[-2] if len(self._offdiag) > 1 else 0.0)
        floor = self.breakdown_tol * max(scale, self.beta, np.finfo(float).tiny)
        if beta <= floor or self.m >= self.op.dim:
            self._offdiag[-1] = 0.0
            self.breakdown = True
            logger.debug("breakdown de Lanczos", m=self.m, beta=beta, floor=floor)
            return True

        self._previous = v
        self.current = w / beta
        return False

    def extend(self, m: int) -> bool:
        while self.m < m and not self.breakdown:
            self.step()
        return self.breakdown

    def hessenberg(self) -> np.ndarray:
        """T_m tridiagonal simétrica."""
        alpha = np.array(self._alpha)
        off = np.array(self._offdiag[:-1])
        return np.diag(alpha) + np.diag(off, 1) + np.diag(off, -1)

    def deflation_point(self) -> Optional[int]:
        """Último k < m con β_k ≤ 1e−8·‖T_m‖_F, o None."""
        if self.m < 2:
            return None
        off = np.abs(np.array(self._offdiag[:-1]))
        thresh = DEFLATION_TOL * float(np.linalg.norm(self.hessenberg(), "fro"))
        small = np.flatnonzero(off <= thresh)
        return int(small[-1]) + 1 if small.size else None

    def truncate(self, k: int) -> None:
        """Reduce T a k×k y marca breakdown."""
        if not 1 <= k <= self.m:
            raise ValueError(f"k debe estar en [1, {self.m}], no {k}")
        self._alpha = self._alpha[:k]
        self._offdiag = self._offdiag[:k]
        self._offdiag[-1] = 0.0
        self._basis = self._basis[:k]
        self.breakdown = True

    @property
    def vectors(self) -> List[np.ndarray]:
        return self._basis

    def decomposition(self) -> TridiagonalDecomposition:
        if self.m == 0:
            raise RuntimeError("no se completó ningún paso de Lanczos")
        return TridiagonalDecomposition(
            alpha=np.array(self._alpha),
            offdiag=np.array(self._offdiag[:-1]),
            h_next=0.0 if self.breakdown else self._offdiag[-1],
            v_next=None if self.breakdown else self.current,
            V=np.column_stack(self._basis) if self.store_basis else None,
            beta=self.beta,
        )


def lanczos(
    op: LinearOperator,
    start: np.ndarray,
    m: int,
    store_basis: bool = True
) -> TridiagonalDecomposition:
    """
    m pasos de Lanczos.

    Raises:
        ZeroStartVector: si start = 0
    """
    if m < 1:
        raise ValueError(f"m debe ser ≥ 1, no {m}")
    process = LanczosProcess(op, start, store_basis=store_basis)
    process.extend(m)
    return process.decomposition()


def two_pass_lanczos_combine(
    op: LinearOperator,
    start: np.ndarray,
    m: int,
    coeffs: np.ndarray
) -> np.ndarray:
    """
    Σ_j coeffs_j·v_j regenerando v_1 … v_m sin guardarlos.

    Repite exactamente los m pasos de la primera pasada (m mvms más), así que
    los vectores coinciden con los de la pasada que guardó la base.

    Args:
        op: el mismo operador de la primera pasada
        start: el mismo vector inicial
        m: pasos de la primera pasada
        coeffs: longitud m (p. ej. H_m^{-1/2} e_1 β)
    """
    coeffs = np.asarray(coeffs)
    if coeffs.shape[0] != m:
        raise ValueError(f"coeffs debe tener longitud {m}, tiene {coeffs.shape[0]}")

    process = LanczosProcess(op, start, store_basis=False)
    result = np.zeros(process.current.shape, dtype=np.result_type(coeffs, process.current))
    for j in range(m):
        result += coeffs[j] * process.current
        if process.step() and j < m - 1:
            logger.warning(f"Breakdown en la segunda pasada en el paso {j + 1} de {m}")
            break
    return result


__all__ = [
    "TridiagonalDecomposition",
    "LanczosProcess",
    "lanczos",
    "two_pass_lanczos_combine",
]
