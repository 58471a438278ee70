"""
Proceso de Arnoldi con Gram–Schmidt modificado.

El proceso es incremental (``ArnoldiProcess.step``) para que los drivers
puedan extender la base entre checkpoints sin recomputarla. Con ``reorth``
se hace una segunda pasada completa de MGS por vector; sin ella, la segunda
pasada sólo se hace cuando la primera cancela demasiado (criterio de Kahan).
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from src.config.settings import get_settings
from src.operators.linear_operator import LinearOperator
from src.utils.errors import ZeroStartVector
from src.utils.logger import get_logger

logger = get_logger(__name__)

EPS = float(np.finfo(float).eps)
SECOND_SWEEP_RATIO = 0.7
ROUNDING_FACTOR = 10.0
DEFLATION_TOL = 1e-8


@dataclass(frozen=True)
class ArnoldiDecomposition:
    """
    Op·V = V·H + h_next·v_next·e_m*.

    Attributes:
        V: base ortonormal (n×m)
        H: Hessenberg superior (m×m)
        h_next: h_{m+1,m} (0 en breakdown)
        v_next: v_{m+1} (None en breakdown)
        beta: norma del vector inicial
    """
    V: np.ndarray
    H: np.ndarray
    h_next: float
    v_next: Optional[np.ndarray]
    beta: float

    @property
    def m(self) -> int:
        return self.H.shape[0]

    @property
    def breakdown(self) -> bool:
        return self.v_next is None

    @property
    def H_extended(self) -> np.ndarray:
        """Matriz (m+1)×m con h_next en la última fila."""
        Hx = np.zeros((self.m + 1, self.m), dtype=self.H.dtype)
        Hx[:self.m] = self.H
        Hx[self.m, self.m - 1] = self.h_next
        return Hx


class ArnoldiProcess:
    """
    Arnoldi incremental sobre un operador instrumentado.

    Example:
        >>> process = ArnoldiProcess(op, b, reorth=True)
        >>> while process.m < 10 and not process.step():
        ...     pass
        >>> dec = process.decomposition()
    """

    def __init__(
        self,
        op: LinearOperator,
        start: np.ndarray,
        reorth: bool = False,
        breakdown_tol: Optional[float] = None
    ):
        start = np.asarray(start)
        beta = float(np.linalg.norm(start))
        if beta == 0.0:
            raise ZeroStartVector("el vector inicial es nulo")

        self.op = op
        self.reorth = reorth
        self.beta = beta
        self.breakdown_tol = (
            breakdown_tol if breakdown_tol is not None else get_settings().BREAKDOWN_TOL
        )
        self.breakdown = False
        self.steps = 0
        self.sweeps: List[int] = []
        self._vectors: List[np.ndarray] = [start / beta]
        self._columns: List[np.ndarray] = []

    @property
    def m(self) -> int:
        """Pasos completados."""
        return len(self._columns)

    @property
    def vectors(self) -> List[np.ndarray]:
        """v_1 … v_m (sin v_{m+1})."""
        return self._vectors[:self.m]

    def step(self) -> bool:
        """
        Un paso de Arnoldi. Devuelve True si hubo breakdown afortunado.

        Sin ``reorth`` la segunda pasada de MGS se hace sólo cuando la primera
        cancela más del 30 % de ‖A v_j‖. Hay breakdown cuando h_{j+1,j} cae
        bajo 1e−14·‖start‖ o bajo el piso de redondeo de la proyección, y
        siempre al llegar a m = n.

        Raises:
            RuntimeError: si se llama después de un breakdown
        """
        if self.breakdown:
            raise RuntimeError("el proceso de Arnoldi ya terminó por breakdown")

        j = self.m
        w = self.op.apply(self._vectors[j])
        w = w.astype(np.result_type(w, self._vectors[j]), copy=True)
        scale = float(np.linalg.norm(w))
        h = np.zeros(j + 2, dtype=w.dtype)

        sweeps = 0
        before = scale
        while True:
            for i in range(j + 1):
                coeff = np.vdot(self._vectors[i], w)
                h[i] += coeff
                w -= coeff * self._vectors[i]
            self.op.count_inner_products(j + 1)
            sweeps += 1
            h_next = float(np.linalg.norm(w))
            if sweeps == 2:
                break
            if not self.reorth and h_next >= SECOND_SWEEP_RATIO * before:
                break
            before = h_next

        self.steps += 1
        self.sweeps.append(sweeps)
        h[j + 1] = h_next
        self._columns.append(h)

        floor = max(
            self.breakdown_tol * self.beta,
            ROUNDING_FACTOR * (j + 1) * EPS * scale,
        )
        if h_next <= floor or self.m >= self.op.dim:
            h[j + 1] = 0.0
            self.breakdown = True
            logger.debug("breakdown de Arnoldi", m=self.m, h_next=h_next, floor=floor)
            return True

        self._vectors.append(w / h_next)
        return False

    def extend(self, m: int) -> bool:
        """Avanza hasta m pasos (o breakdown). Devuelve ``self.breakdown``."""
        while self.m < m and not self.breakdown:
            self.step()
        return self.breakdown

    def hessenberg(self) -> np.ndarray:
        """H_m (m×m) de los pasos completados."""
        m = self.m
        dtype = np.result_type(*self._columns) if self._columns else float
        H = np.zeros((m, m), dtype=dtype)
        for j, col in enumerate(self._columns):
            rows = min(j + 2, m)
            H[:rows, j] = col[:rows]
        return H

    def deflation_point(self) -> Optional[int]:
        """
        Último k < m con |h_{k+1,k}| ≤ 1e−8·‖H_m‖_F (breakdown no detectado).

        Returns:
            k, o None si ningún subdiagonal es despreciable
        """
        H = self.hessenberg()
        thresh = DEFLATION_TOL * float(np.linalg.norm(H, "fro"))
        small = [k for k in range(1, self.m) if abs(H[k, k - 1]) <= thresh]
        return small[-1] if small else None

    def truncate(self, k: int) -> None:
        """Reduce la base a k vectores y marca breakdown (las mvms ya gastadas quedan)."""
        if not 1 <= k <= self.m:
            raise ValueError(f"k debe estar en [1, {self.m}], no {k}")
        self._columns = self._columns[:k]
        self._vectors = self._vectors[:k]
        self._columns[-1][k] = 0.0
        self.breakdown = True
        logger.debug("base de Arnoldi truncada", m=k, steps=self.steps)

    def decomposition(self) -> ArnoldiDecomposition:
        m = self.m
        if m == 0:
            raise RuntimeError("no se completó ningún paso de Arnoldi")
        h_next = 0.0 if self.breakdown else float(np.real(self._columns[-1][m]))
        return ArnoldiDecomposition(
            V=np.column_stack(self._vectors[:m]),
            H=self.hessenberg(),
            h_next=h_next,
            v_next=None if self.breakdown else self._vectors[m],
            beta=self.beta,
        )


def arnoldi(
    op: LinearOperator,
    start: np.ndarray,
    m: int,
    reorth: bool = False
) -> ArnoldiDecomposition:
    """
    m pasos de Arnoldi (MGS, segunda pasada opcional).

    Args:
        op: operador (cuenta mvms y productos internos)
        start: vector inicial no nulo
        m: pasos (≥ 1)
        reorth: reortogonalización completa

    Returns:
        ArnoldiDecomposition de dimensión ≤ m (menor si hubo breakdown)

    Raises:
        ZeroStartVector: si start = 0
    """
    if m < 1:
        raise ValueError(f"m debe ser ≥ 1, no {m}")
    process = ArnoldiProcess(op, start, reorth=reorth)
    process.extend(m)
    return process.decomposition()


__all__ = ["ArnoldiDecomposition", "ArnoldiProcess", "arnoldi"]
