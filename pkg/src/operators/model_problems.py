"""
Generadores de problemas modelo.

- Laplaciano de diferencias finitas (1D/2D/3D, Dirichlet)
- Laplaciano de grado de entrada de un grafo dirigido, L = D_in − A
- Matriz sintética no hermitiana con espectro en ℂ⁺
- Vectores aleatorios reproducibles
"""

from typing import Optional, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from src.models.schemas import ModelFamily, RhsKind
from src.operators.linear_operator import as_csr
from src.utils.errors import SpectrumLeak
from src.utils.logger import get_logger

logger = get_logger(__name__)

_LAPLACE_DIMS = {
    ModelFamily.LAPLACE1D: 1,
    ModelFamily.LAPLACE2D: 2,
    ModelFamily.LAPLACE3D: 3,
}

SPECTRUM_CHECK_LIMIT = 500


# ═══════════════════════════════════════════════════════════════════════════
# LAPLACIANOS
# ═══════════════════════════════════════════════════════════════════════════

def _laplace_1d(N: int) -> sp.csr_matrix:
    if N == 1:
        return sp.csr_matrix(np.array([[2.0]]))
    off = -np.ones(N - 1)
    return sp.diags([off, 2.0 * np.ones(N), off], [-1, 0, 1], format="csr")


def make_laplace(family: str, N: int) -> sp.csr_matrix:
    """
    Laplaciano negativo de segundo orden con condiciones de Dirichlet.

    Args:
        family: laplace1d | laplace2d | laplace3d
        N: puntos interiores por dirección

    Returns:
        Matriz CSR de dimensión N^dim (diagonal 2·dim, fuera de la diagonal −1)

    Example:
        >>> make_laplace("laplace1d", 3).toarray()
        array([[ 2., -1.,  0.],
               [-1.,  2., -1.],
               [ 0., -1.,  2.]])
    """
    family = ModelFamily(family)
    if family not in _LAPLACE_DIMS:
        raise ValueError(f"familia no laplaciana: {family.value}")
    if N < 1:
        raise ValueError(f"N debe ser ≥ 1, no {N}")

    T = _laplace_1d(N)
    eye = sp.identity(N, format="csr")
    dim = _LAPLACE_DIMS[family]
    if dim == 1:
        A = T
    elif dim == 2:
        A = sp.kron(eye, T) + sp.kron(T, eye)
    else:
        A = (sp.kron(sp.kron(eye, eye), T)
             + sp.kron(sp.kron(eye, T), eye)
             + sp.kron(sp.kron(T, eye), eye))
    return as_csr(A)


def laplace_spectral_interval(family: str, N: int) -> Tuple[float, float]:
    """
    Intervalo espectral exacto [λ_min, λ_max] del laplaciano.

    λ_min = dim·2(1 − cos(π/(N+1))),  λ_max = dim·2(1 + cos(π/(N+1)))
    """
    dim = _LAPLACE_DIMS[ModelFamily(family)]
    c = np.cos(np.pi / (N + 1))
    return dim * 2.0 * (1.0 - c), dim * 2.0 * (1.0 + c)


# ═══════════════════════════════════════════════════════════════════════════
# GRAFOS
# ═══════════════════════════════════════════════════════════════════════════

def make_graph_laplacian(adjacency) -> sp.csr_matrix:
    """
    Laplaciano de grado de entrada L = D_in − A.

    Con A[i, j] el peso de la arista i → j, el grado de entrada del nodo j es
    la suma de la columna j, por lo que cada columna de L suma cero.

    Raises:
        ValueError: si la adyacencia tiene pesos negativos
    """
    A = as_csr(adjacency).astype(float)
    if A.nnz and A.data.min() < 0:
        raise ValueError("la adyacencia debe tener entradas no negativas")
    in_degree = np.asarray(A.sum(axis=0)).ravel()
    return as_csr(sp.diags(in_degree, format="csr") - A)


def make_random_digraph(
    n: int,
    out_degree: int = 3,
    seed: int = 0,
    strongly_connected: bool = True
) -> sp.csr_matrix:
    """
    Adyacencia aleatoria sin lazos: ``out_degree`` aristas salientes por nodo.

    Con ``strongly_connected`` se agrega el ciclo 0 → 1 → … → n−1 → 0, que
    garantiza que 0 es autovalor simple del laplaciano.
    """
    if n < 2:
        raise ValueError(f"n debe ser ≥ 2, no {n}")
    rng = np.random.default_rng(seed)
    k = min(out_degree, n - 1)
    rows, cols = [], []
    for i in range(n):
        candidates = np.delete(np.arange(n), i)
        targets = rng.choice(candidates, size=k, replace=False)
        rows.extend([i] * k)
        cols.extend(targets.tolist())
    if strongly_connected:
        rows.extend(range(n))
        cols.extend([(i + 1) % n for i in range(n)])
    A = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n)).tocsr()
    A.data[:] = 1.0
    return as_csr(A)


# ═══════════════════════════════════════════════════════════════════════════
# NO HERMITIANA SINTÉTICA
# ═══════════════════════════════════════════════════════════════════════════

def make_synthetic_nonhermitian(
    n: int,
    seed: int = 0,
    skew_scale: float = 0.5,
    shift: float = 1.0
) -> sp.csr_matrix:
    """
    Matriz dispersa no simétrica con espectro en ℂ⁺.

    A = (L_1D + shift·I) + t·S con S antisimétrica aleatoria. La parte hermitiana
    es L_1D + shift·I ≥ shift·I, así que el campo de valores queda a la derecha
    de Re z = shift ≥ 0.05·λ_min. t se elige con ‖tS‖_∞ = skew_scale·shift.

    Args:
        n: dimensión (≥ 2)
        seed: semilla del generador
        skew_scale: tamaño relativo de la perturbación (0 → simétrica)
        shift: desplazamiento del laplaciano 1D

    Raises:
        SpectrumLeak: si (n ≤ 500) algún autovalor tiene Re ≤ 0
    """
    if n < 2:
        raise ValueError(f"n debe ser ≥ 2, no {n}")
    base = _laplace_1d(n) + shift * sp.identity(n, format="csr")

    if skew_scale > 0:
        rng = np.random.default_rng(seed)
        density = min(1.0, 4.0 / n)
        R = sp.random(n, n, density=density, random_state=rng,
                      data_rvs=rng.standard_normal, format="csr")
        S = R - R.T
        row_sums = np.asarray(abs(S).sum(axis=1)).ravel()
        norm_inf = float(row_sums.max()) if row_sums.size else 0.0
        if norm_inf > 0:
            base = base + (skew_scale * shift / norm_inf) * S

    A = as_csr(base)

    if n <= SPECTRUM_CHECK_LIMIT:
        eigenvalues = scipy.linalg.eigvals(A.toarray())
        if np.any(eigenvalues.real <= 0):
            raise SpectrumLeak(
                f"autovalor con Re ≤ 0: {eigenvalues[eigenvalues.real <= 0][0]:.6g}"
            )
    return A


# ═══════════════════════════════════════════════════════════════════════════
# VECTORES
# ═══════════════════════════════════════════════════════════════════════════

def random_unit_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    """Entradas normales estándar i.i.d., luego normalizadas."""
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


def make_rhs(n: int, kind: str, seed: int, index: int = 0) -> np.ndarray:
    """
    Lado derecho b según ``kind``.

    Raises:
        ValueError: si index ≥ n para kind = unit
    """
    kind = RhsKind(kind)
    if kind == RhsKind.RANDOM:
        return random_unit_vector(n, np.random.default_rng(seed))
    if kind == RhsKind.UNIT:
        if index >= n:
            raise ValueError(f"índice {index} fuera de rango para n={n}")
        b = np.zeros(n)
        b[index] = 1.0
        return b
    return np.ones(n)


def make_model_problem(
    family: str,
    N: Optional[int] = None,
    n: Optional[int] = None,
    seed: int = 0,
    out_degree: int = 3,
    skew_scale: float = 0.5,
    shift: float = 1.0
) -> sp.csr_matrix:
    """Despacha a los generadores según la familia (entrada de gen-matrix y escenarios)."""
    family = ModelFamily(family)
    if family in _LAPLACE_DIMS:
        if N is None:
            raise ValueError(f"{family.value} requiere N")
        return make_laplace(family, N)
    if n is None:
        raise ValueError(f"{family.value} requiere n")
    if family == ModelFamily.GRAPH_IN_DEGREE_LAPLACIAN:
        return make_graph_laplacian(make_random_digraph(n, out_degree, seed))
    return make_synthetic_nonhermitian(n, seed, skew_scale, shift)


__all__ = [
    "make_laplace",
    "laplace_spectral_interval",
    "make_graph_laplacian",
    "make_random_digraph",
    "make_synthetic_nonhermitian",
    "random_unit_vector",
    "make_rhs",
    "make_model_problem",
]
