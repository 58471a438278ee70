"""
Interpolante de z^{-1/2} en valores de Ritz, en forma de Newton.

Los nodos se ordenan por Leja (el de mayor módulo primero, luego el que
maximiza el producto de distancias a los ya elegidos) y los coeficientes son
las diferencias divididas. q(A)v se aplica por Horner con d − 1 mvms.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np

from src.krylov.ritz import RitzSet
from src.linalg.dense import on_branch_cut
from src.models.schemas import PolyKind
from src.operators.linear_operator import LinearOperator
from src.poly.base import PrecondPoly
from src.poly.contour_ls import hull_sample
from src.utils.errors import BranchCutNode, DimensionMismatch, NearCoincidentNodes
from src.utils.logger import get_logger

logger = get_logger(__name__)

BRANCH_NODE_TOL = 1e-13
COINCIDENT_TOL = 1e-12
CONJUGATE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class NewtonPoly(PrecondPoly):
    """
    q(z) = Σ_j dd_j · Π_{i<j} (z − x_i).

    Attributes:
        nodes: x_0 … x_k en orden de Leja
        divided_diffs: f[x_0], f[x_0,x_1], …
    """
    nodes: np.ndarray
    divided_diffs: np.ndarray

    kind = PolyKind.RITZ_NEWTON

    @property
    def degree(self) -> int:
        return len(self.nodes) - 1

    @cached_property
    def is_real(self) -> bool:
        """Nodos cerrados bajo conjugación."""
        if not np.iscomplexobj(self.nodes):
            return True
        scale = max(float(np.abs(self.nodes).max()), np.finfo(float).tiny)
        gaps = np.abs(self.nodes.conj()[:, None] - self.nodes[None, :]).min(axis=1)
        return bool(np.all(gaps <= CONJUGATE_TOL * scale))

    def evaluate(self, z) -> np.ndarray:
        z = np.asarray(z)
        k = self.degree
        p = np.full(z.shape, self.divided_diffs[k], dtype=np.result_type(z, self.divided_diffs))
        for j in range(k - 1, -1, -1):
            p = p * (z - self.nodes[j]) + self.divided_diffs[j]
        return p

    def apply(self, op: LinearOperator, v: np.ndarray) -> np.ndarray:
        return newton_apply(self, op, v)

    def certification_sample(self, n_points: int = 1000) -> np.ndarray:
        """Nodos y borde de su envolvente convexa (en los nodos q es exacto)."""
        return hull_sample(self.nodes, n_points)


def leja_order(nodes: np.ndarray) -> np.ndarray:
    """
    Ordena los nodos por Leja.

    Empates (y el orden de partida) se resuelven ordenando antes por parte
    real y luego imaginaria, de modo que el resultado es determinista.
    """
    pts = np.asarray(nodes)
    order = np.lexsort((np.imag(pts), np.real(pts)))
    pts = pts[order]
    n = pts.shape[0]
    if n <= 1:
        return pts.copy()

    chosen = [int(np.argmax(np.abs(pts)))]
    available = np.ones(n, dtype=bool)
    available[chosen[0]] = False
    log_dist = np.zeros(n)

    with np.errstate(divide="ignore"):
        for _ in range(n - 1):
            log_dist += np.log(np.abs(pts - pts[chosen[-1]]))
            score = np.where(available, log_dist, -np.inf)
            nxt = int(np.argmax(score))
            chosen.append(nxt)
            available[nxt] = False

    return pts[chosen]


def divided_differences(nodes: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Coeficientes de Newton f[x_0], f[x_0,x_1], … (tabla en sitio)."""
    coeffs = np.array(values, dtype=np.result_type(nodes, values), copy=True)
    n = coeffs.shape[0]
    for level in range(1, n):
        coeffs[level:] = (coeffs[level:] - coeffs[level - 1:-1]) / (
            nodes[level:] - nodes[:n - level]
        )
    return coeffs


def ritz_interp_poly(ritz: Union[RitzSet, np.ndarray]) -> NewtonPoly:
    """
    Interpolante de z^{-1/2} en los valores de Ritz.

    Args:
        ritz: valores de Ritz (d de ellos → grado d − 1)

    Returns:
        NewtonPoly con nodos en orden de Leja

    Raises:
        BranchCutNode: algún nodo sobre (−∞, 0]
        NearCoincidentNodes: dos nodos a distancia < 1e−12·max|nodo|
    """
    values = ritz.values if isinstance(ritz, RitzSet) else np.asarray(ritz)
    if values.size == 0:
        raise ValueError("se necesita al menos un valor de Ritz")
    if np.iscomplexobj(values) and np.all(np.imag(values) == 0):
        values = values.real

    scale = float(np.abs(values).max())
    bad = on_branch_cut(values, scale, tol=BRANCH_NODE_TOL)
    if np.any(bad):
        raise BranchCutNode(f"nodo de Ritz sobre (−∞, 0]: {values[bad][0]:.6g}")

    if values.size > 1:
        gaps = np.abs(values[:, None] - values[None, :])
        gaps[np.diag_indices(values.size)] = np.inf
        if gaps.min() < COINCIDENT_TOL * scale:
            raise NearCoincidentNodes(
                f"nodos de Ritz a distancia {gaps.min():.3e} (escala {scale:.3e})"
            )

    nodes = leja_order(values)
    if np.iscomplexobj(nodes):
        targets = 1.0 / np.sqrt(nodes)
    else:
        targets = 1.0 / np.sqrt(nodes.astype(float))
    dd = divided_differences(nodes, targets)

    logger.debug(
        "interpolante de Newton construido",
        degree=nodes.size - 1,
        complex_nodes=bool(np.iscomplexobj(nodes)),
    )
    return NewtonPoly(nodes=nodes, divided_diffs=dd)


def newton_apply(q: NewtonPoly, op: LinearOperator, v: np.ndarray) -> np.ndarray:
    """
    q(A)·v por Horner: w ← dd_k v;  w ← (A − x_j I) w + dd_j v.

    Exactamente ``degree`` mvms. Si q es real y A, v también, la parte
    imaginaria de redondeo se descarta.
    """
    if v.shape[0] != op.dim:
        raise DimensionMismatch(
            f"vector de longitud {v.shape[0]} para operador de dimensión {op.dim}"
        )
    k = q.degree
    dd = q.divided_diffs
    w = dd[k] * v
    for j in range(k - 1, -1, -1):
        w = op.shifted(q.nodes[j]).apply(w) + dd[j] * v
    return q._realify(op, v, w)


__all__ = [
    "NewtonPoly",
    "leja_order",
    "divided_differences",
    "ritz_interp_poly",
    "newton_apply",
]
