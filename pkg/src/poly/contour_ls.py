"""
Polinomio de mínimos cuadrados para z^{-1/2} sobre un contorno que encierra
los valores de Ritz.

El contorno es la envolvente convexa de los valores de Ritz, con la parte
cercana al origen empujada hasta el círculo |z| = min_abs, discretizado en
nodos uniformes en longitud de arco. La base polinomial ortonormal sobre los
nodos se obtiene con Arnoldi sobre diag(nodos), y la misma recurrencia de
Arnoldi se reutiliza para aplicar q(A)v sin pasar nunca por monomios.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp
import scipy.spatial

from src.config.settings import get_settings
from src.krylov.arnoldi import ArnoldiProcess
from src.krylov.ritz import RitzSet
from src.linalg.dense import lstsq, on_branch_cut
from src.models.schemas import PolyKind
from src.operators.linear_operator import LinearOperator, PlainOperator
from src.poly.base import PrecondPoly
from src.utils.errors import (
    DegenerateContour,
    DimensionMismatch,
    NodeOnBranchCut,
    RecurrenceBreakdown,
)
from src.utils.logger import get_logger

logger = get_logger(__name__)

DISTINCT_TOL = 1e-12
COLLINEAR_TOL = 1e-12
CONJUGATE_TOL = 1e-10
RECURRENCE_TOL = 1e-14
MAX_CONTOUR_NODES = 100_000
DENSE_REFINEMENT = 10


@dataclass(frozen=True, eq=False)
class ContourLSPoly(PrecondPoly):
    """
    q = Σ_j alpha_j p_j, con p_j la base de Arnoldi sobre los nodos.

    Attributes:
        nodes: z_1 … z_N del contorno
        H_small: Hessenberg ((d+1)×d) de Arnoldi sobre diag(nodos)
        alpha: coeficientes en la base p_0 … p_{d−1}
    """
    nodes: np.ndarray
    H_small: np.ndarray
    alpha: np.ndarray

    kind = PolyKind.CONTOUR_LS

    @property
    def degree(self) -> int:
        return len(self.alpha) - 1

    @cached_property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.H_small) and not np.iscomplexobj(self.alpha)

    def evaluate(self, z) -> np.ndarray:
        z = np.asarray(z)
        scalar = z.ndim == 0
        z = np.atleast_1d(z)
        result = _recurrence(self, lambda w: z * w, np.ones(z.shape))
        return result[0] if scalar else result

    def apply(self, op: LinearOperator, v: np.ndarray) -> np.ndarray:
        return contour_ls_apply(self, op, v)

    def certification_sample(self, n_points: int = 1000) -> np.ndarray:
        return self.nodes.copy()


# ═══════════════════════════════════════════════════════════════════════════
# CONTORNO
# ═══════════════════════════════════════════════════════════════════════════

def _distinct(values: np.ndarray, scale: float) -> np.ndarray:
    keep = []
    for z in values:
        if all(abs(z - w) > DISTINCT_TOL * scale for w in keep):
            keep.append(z)
    return np.array(keep, dtype=complex)


def _polygon(points: np.ndarray) -> np.ndarray:
    """Vértices (antihorario) de la envolvente; un segmento ida y vuelta si son colineales."""
    coords = np.column_stack([points.real, points.imag])
    centered = coords - coords.mean(axis=0)
    _, sv, vt = np.linalg.svd(centered, full_matrices=False)

    if sv.shape[0] < 2 or sv[1] <= COLLINEAR_TOL * max(sv[0], np.finfo(float).tiny):
        t = centered @ vt[0]
        lo, hi = points[int(np.argmin(t))], points[int(np.argmax(t))]
        return np.array([hi, lo])

    hull = scipy.spatial.ConvexHull(coords)
    return points[hull.vertices]


def _start_on_real_axis(vertices: np.ndarray) -> np.ndarray:
    """Rota el polígono cerrado para que empiece en su cruce con el eje real más a la derecha."""
    n = vertices.shape[0]
    best_x: Optional[float] = None
    best = vertices
    for i in range(n):
        z1, z2 = vertices[i], vertices[(i + 1) % n]
        if z1.imag == 0.0:
            x = z1.real
            rotated = np.roll(vertices, -i)
        elif z1.imag * z2.imag < 0.0:
            t = z1.imag / (z1.imag - z2.imag)
            cross = complex(z1.real + t * (z2.real - z1.real), 0.0)
            x = cross.real
            rotated = np.concatenate([[cross], vertices[i + 1:], vertices[:i + 1]])
        else:
            continue
        if best_x is None or x > best_x:
            best_x, best = x, rotated
    return best


def _densify(vertices: np.ndarray, spacing: float) -> np.ndarray:
    """Polilínea cerrada muestreada con paso ≤ spacing (último punto = primero)."""
    closed = np.concatenate([vertices, vertices[:1]])
    pieces = []
    for z1, z2 in zip(closed[:-1], closed[1:]):
        count = max(int(np.ceil(abs(z2 - z1) / spacing)), 1)
        pieces.append(z1 + (z2 - z1) * np.arange(count) / count)
    pieces.append(closed[-1:])
    return np.concatenate(pieces)


def _crosses_branch_cut(path: np.ndarray) -> bool:
    """La polilínea corta (−∞, 0] en algún tramo."""
    z1, z2 = path[:-1], path[1:]
    y1, y2 = z1.imag, z2.imag
    flat = (y1 == 0.0) & (y2 == 0.0)
    if np.any(flat & (np.minimum(z1.real, z2.real) <= 0.0)):
        return True
    crossing = (y1 * y2 <= 0.0) & ~flat
    t = y1[crossing] / (y1[crossing] - y2[crossing])
    x = z1[crossing].real + t * (z2[crossing].real - z1[crossing].real)
    return bool(np.any(x <= 0.0))


def build_contour(
    values: np.ndarray,
    min_abs: Optional[float] = None,
    step: Optional[float] = None
) -> np.ndarray:
    """
    Nodos de contorno alrededor de ``values``.

    Args:
        values: valores de Ritz
        min_abs: radio mínimo; puntos más cercanos al origen se proyectan
            radialmente sobre |z| = min_abs
        step: separación aproximada entre nodos (longitud de arco)

    Returns:
        Nodos complejos, uniformes en longitud de arco

    Raises:
        DegenerateContour: menos de dos valores distintos
        NodeOnBranchCut: el contorno toca (−∞, 0]
    """
    settings = get_settings()
    min_abs = settings.CONTOUR_MIN_ABS if min_abs is None else min_abs
    step = settings.CONTOUR_STEP if step is None else step

    values = np.asarray(values, dtype=complex)
    scale = max(float(np.abs(values).max()) if values.size else 0.0, min_abs)
    points = _distinct(values, scale)
    if points.shape[0] < 2:
        raise DegenerateContour(
            f"se necesitan al menos 2 valores de Ritz distintos, hay {points.shape[0]}"
        )

    vertices = _start_on_real_axis(_polygon(points))
    dense = _densify(vertices, step / DENSE_REFINEMENT)

    radius = np.abs(dense)
    if np.any(radius == 0.0):
        raise NodeOnBranchCut("el contorno pasa por el origen")
    near = radius < min_abs
    dense[near] = min_abs * dense[near] / radius[near]
    if _crosses_branch_cut(dense):
        raise NodeOnBranchCut("el contorno cruza el semieje real negativo")

    seg = np.abs(np.diff(dense))
    keep = np.concatenate([[True], seg > 0.0])
    dense = dense[keep]
    arclength = np.concatenate([[0.0], np.cumsum(seg[seg > 0.0])])
    total = float(arclength[-1])

    count = max(int(round(total / step)), 2)
    if count > MAX_CONTOUR_NODES:
        logger.warning(
            f"Contorno de longitud {total:.3e}: se limita a {MAX_CONTOUR_NODES} nodos "
            f"(paso efectivo {total / MAX_CONTOUR_NODES:.3e})"
        )
        count = MAX_CONTOUR_NODES
    s = np.arange(count) * (total / count)
    nodes = np.interp(s, arclength, dense.real) + 1j * np.interp(s, arclength, dense.imag)

    bad = on_branch_cut(nodes, scale)
    if np.any(bad):
        raise NodeOnBranchCut(
            f"nodo de contorno sobre (−∞, 0]: {nodes[bad][0]:.6g}"
        )
    return nodes


def hull_sample(values: np.ndarray, n_points: int) -> np.ndarray:
    """
    Los propios valores más ``n_points`` puntos uniformes (longitud de arco)
    sobre el borde de su envolvente convexa.

    Para valores reales el borde es el segmento [min, max].
    """
    values = np.asarray(values)
    real_input = not np.iscomplexobj(values) or np.all(np.imag(values) == 0)
    scale = max(float(np.abs(values).max()), np.finfo(float).tiny)
    points = _distinct(values.astype(complex), scale)
    if points.shape[0] < 2 or n_points < 1:
        return values.real.copy() if real_input else values.copy()

    vertices = _polygon(points)
    closed = np.concatenate([vertices, vertices[:1]])
    arclength = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(closed)))])
    s = np.arange(n_points) * (arclength[-1] / n_points)
    boundary = np.interp(s, arclength, closed.real) + 1j * np.interp(s, arclength, closed.imag)

    sample = np.concatenate([points, boundary])
    return sample.real.copy() if real_input else sample


def _conjugate_closed(nodes: np.ndarray) -> bool:
    scale = float(np.abs(nodes).max())
    tree = scipy.spatial.cKDTree(np.column_stack([nodes.real, nodes.imag]))
    dist, _ = tree.query(np.column_stack([nodes.real, -nodes.imag]))
    return bool(np.all(dist <= CONJUGATE_TOL * scale))


# ═══════════════════════════════════════════════════════════════════════════
# POLINOMIO
# ═══════════════════════════════════════════════════════════════════════════

def contour_ls_poly(
    ritz: Union[RitzSet, np.ndarray],
    degree: Optional[int] = None,
    min_abs: Optional[float] = None,
    step: Optional[float] = None
) -> ContourLSPoly:
    """
    Polinomio de grado ``degree`` que minimiza Σ |q(z_i) − z_i^{-1/2}|².

    Args:
        ritz: valores de Ritz que el contorno debe encerrar
        degree: grado (por defecto len(ritz) − 1)
        min_abs, step: ver build_contour

    Raises:
        DegenerateContour: contorno degenerado o con ≤ degree + 1 nodos
        NodeOnBranchCut: el contorno toca (−∞, 0]
    """
    values = ritz.values if isinstance(ritz, RitzSet) else np.asarray(ritz)
    degree = values.shape[0] - 1 if degree is None else degree
    if degree < 0:
        raise ValueError(f"degree debe ser ≥ 0, no {degree}")
    d = degree + 1

    nodes = build_contour(values, min_abs=min_abs, step=step)
    N = nodes.shape[0]
    if N <= d:
        raise DegenerateContour(f"{N} nodos de contorno para grado {degree}")

    symmetric = _conjugate_closed(nodes)

    # Base ortonormal sobre los nodos (contadores propios, no cuentan en la corrida)
    weights = PlainOperator(sp.diags(nodes))
    process = ArnoldiProcess(weights, np.ones(N) / np.sqrt(N), reorth=True)
    if process.extend(d):
        raise DegenerateContour(
            f"Arnoldi sobre los nodos terminó en {process.m} pasos (< {d})"
        )
    dec = process.decomposition()
    P = dec.V
    H_small = dec.H_extended
    alpha = lstsq(P, 1.0 / np.sqrt(nodes))

    if symmetric:
        H_small = H_small.real.copy()
        alpha = alpha.real.copy()

    logger.debug(
        "polinomio de contorno construido",
        degree=degree,
        nodes=N,
        real=symmetric,
    )
    return ContourLSPoly(nodes=nodes, H_small=H_small, alpha=alpha)


def _recurrence(q: ContourLSPoly, multiply, w0: np.ndarray) -> np.ndarray:
    """Σ alpha_j w_j con w_{k+1} = (mult(w_k) − Σ_{i≤k} H[i,k] w_i) / H[k+1,k]."""
    H = q.H_small
    N = q.nodes.shape[0]
    basis = [w0 / np.sqrt(N)]
    result = q.alpha[0] * basis[0]
    for k in range(q.degree):
        t = multiply(basis[k])
        for i in range(k + 1):
            t = t - H[i, k] * basis[i]
        pivot = H[k + 1, k]
        if abs(pivot) < RECURRENCE_TOL:
            raise RecurrenceBreakdown(f"|H[{k + 1},{k}]| = {abs(pivot):.3e}")
        basis.append(t / pivot)
        result = result + q.alpha[k + 1] * basis[k + 1]
    return result


def contour_ls_apply(q: ContourLSPoly, op: LinearOperator, v: np.ndarray) -> np.ndarray:
    """
    q(A)·v reutilizando la recurrencia de Arnoldi de los nodos.

    Exactamente ``degree`` mvms y ningún producto interno.

    Raises:
        RecurrenceBreakdown: |H[k+1, k]| < 1e−14
    """
    if v.shape[0] != op.dim:
        raise DimensionMismatch(
            f"vector de longitud {v.shape[0]} para operador de dimensión {op.dim}"
        )
    w = _recurrence(q, op.apply, np.asarray(v))
    return q._realify(op, v, w)


__all__ = [
    "ContourLSPoly",
    "build_contour",
    "hull_sample",
    "contour_ls_poly",
    "contour_ls_apply",
]
