"""
Núcleos densos de álgebra lineal para matrices pequeñas.

Responsabilidades:
- Forma de Schur compleja de matrices Hessenberg (H_m de Arnoldi)
- Raíz cuadrada principal por recurrencia de Schur–Parlett
- Producto A^{-1/2}·v mediante resolución con el factor triangular
- Autovalores de matrices tridiagonales simétricas (ruta Lanczos)
- Mínimos cuadrados por QR

Las matrices hermitianas (‖H − H*‖_max ≤ 1e−13·escala) se desvían a la ruta
de autovalores, que evita aritmética compleja innecesaria.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.linalg

from src.utils.errors import (
    BranchCutViolation,
    NonConvergence,
    NotHessenberg,
    RankDeficient,
    SingularMatrix,
    ZeroDiagonalPair,
)
from src.utils.logger import get_logger

logger = get_logger(__name__)

BRANCH_TOL = 1e-13
PAIR_TOL = 1e-14
PIVOT_TOL = 1e-14
HERMITIAN_TOL = 1e-13
RANK_TOL = 1e-13


@dataclass(frozen=True)
class SchurForm:
    """A = Q T Q* con Q unitaria y T triangular superior."""
    Q: np.ndarray
    T: np.ndarray

    @property
    def size(self) -> int:
        return self.T.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.diag(self.T)


# ═══════════════════════════════════════════════════════════════════════════
# UTILIDADES
# ═══════════════════════════════════════════════════════════════════════════

def _as_square(A: np.ndarray, name: str = "A") -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} debe ser cuadrada, shape={A.shape}")
    return A


def is_hermitian(A: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    """‖A − A*‖_max ≤ tol·max(1, ‖A‖_max)."""
    A = np.asarray(A)
    if A.size == 0:
        return True
    scale = max(1.0, float(np.abs(A).max()))
    return float(np.abs(A - A.conj().T).max()) <= tol * scale


def is_tridiagonal(A: np.ndarray) -> bool:
    """Sólo diagonal, sub- y superdiagonal no nulas."""
    A = np.asarray(A)
    n = A.shape[0]
    if n <= 2:
        return True
    return not np.any(np.triu(A, 2)) and not np.any(np.tril(A, -2))


def on_branch_cut(z: np.ndarray, scale: float, tol: float = BRANCH_TOL) -> np.ndarray:
    """Máscara de puntos sobre (−∞, 0] con tolerancia relativa a ``scale``."""
    z = np.asarray(z)
    thresh = tol * max(scale, np.finfo(float).tiny)
    return (np.abs(np.imag(z)) <= thresh) & (np.real(z) <= thresh)


def _maybe_real(X: np.ndarray, real_input: bool) -> np.ndarray:
    if real_input and np.iscomplexobj(X):
        return X.real.copy()
    return X


# ═══════════════════════════════════════════════════════════════════════════
# SCHUR
# ═══════════════════════════════════════════════════════════════════════════

def hessenberg_schur(H: np.ndarray) -> SchurForm:
    """
    Forma de Schur compleja de una matriz Hessenberg superior.

    Args:
        H: matriz Hessenberg superior (n×n)

    Returns:
        SchurForm con diag(T) = autovalores de H

    Raises:
        NotHessenberg: si hay entradas no nulas bajo la primera subdiagonal
        NonConvergence: si la iteración QR de LAPACK no converge
    """
    H = _as_square(H, "H")
    scale = max(1.0, float(np.abs(H).max())) if H.size else 1.0
    if H.shape[0] > 2 and np.abs(np.tril(H, -2)).max() > HERMITIAN_TOL * scale:
        raise NotHessenberg("H tiene entradas no nulas bajo la primera subdiagonal")

    try:
        T, Q = scipy.linalg.schur(H.astype(complex), output="complex")
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise NonConvergence(f"Schur no convergió para n={H.shape[0]}: {e}") from e

    return SchurForm(Q=Q, T=np.triu(T))


# ═══════════════════════════════════════════════════════════════════════════
# RAÍZ CUADRADA PRINCIPAL
# ═══════════════════════════════════════════════════════════════════════════

def _schur_sqrt(A: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Devuelve (Q, R) con R² = T triangular y A = Q T Q*."""
    n = A.shape[0]
    scale = float(np.linalg.norm(A, "fro"))
    # A = P H P*, H = Q_h T Q_h*
    H, P = scipy.linalg.hessenberg(A, calc_q=True)
    schur = hessenberg_schur(H)
    T, Q = schur.T, P @ schur.Q

    lam = np.diag(T)
    bad = on_branch_cut(lam, scale)
    if np.any(bad):
        raise BranchCutViolation(
            f"Autovalor sobre (−∞, 0]: {lam[bad][0]:.6g}"
        )

    diag = np.sqrt(lam.astype(complex))
    R = np.zeros_like(T, dtype=complex)
    R[np.diag_indices(n)] = diag
    pair_tol = PAIR_TOL * max(1.0, float(np.abs(diag).max()))

    # Recurrencia de Parlett columna a columna, de abajo hacia arriba
    for j in range(1, n):
        for i in range(j - 1, -1, -1):
            denom = diag[i] + diag[j]
            if abs(denom) < pair_tol:
                raise ZeroDiagonalPair(
                    f"r_ii + r_jj ≈ 0 en (i, j) = ({i}, {j})"
                )
            s = T[i, j] - R[i, i + 1:j] @ R[i + 1:j, j]
            R[i, j] = s / denom

    return Q, R


def dense_sqrtm(A: np.ndarray) -> np.ndarray:
    """
    Raíz cuadrada principal X (X² = A, espectro con arg en (−π/2, π/2]).

    Args:
        A: matriz cuadrada sin autovalores en (−∞, 0]

    Returns:
        X real si A es real, compleja si no

    Raises:
        BranchCutViolation: autovalor sobre el corte de rama
        ZeroDiagonalPair: par de raíces de suma casi nula

    Example:
        >>> dense_sqrtm(np.diag([4.0, 9.0]))
        array([[2., 0.],
               [0., 3.]])
    """
    A = _as_square(A)
    real_input = not np.iscomplexobj(A)
    if A.shape[0] == 0:
        return A.copy()

    if is_hermitian(A):
        lam, U = scipy.linalg.eigh((A + A.conj().T) / 2)
        scale = float(np.linalg.norm(A, "fro"))
        bad = on_branch_cut(lam, scale)
        if np.any(bad):
            raise BranchCutViolation(f"Autovalor sobre (−∞, 0]: {lam[bad][0]:.6g}")
        X = (U * np.sqrt(lam)) @ U.conj().T
        return _maybe_real(X, real_input)

    Q, R = _schur_sqrt(A)
    X = Q @ R @ Q.conj().T
    return _maybe_real(X, real_input)


def dense_inv_sqrtm_times(A: np.ndarray, v: np.ndarray) -> np.ndarray:
    """
    Calcula A^{-1/2}·v.

    Ruta general: Schur + Parlett para R = T^{1/2}, luego
    A^{-1/2} v = Q R^{-1} Q* v con una resolución triangular.
    Ruta hermitiana: autovalores (tridiagonal si corresponde).

    Raises:
        BranchCutViolation, ZeroDiagonalPair: ver dense_sqrtm
        SingularMatrix: pivote |r_ii| < 1e−14·‖R‖_F
    """
    A = _as_square(A)
    v = np.asarray(v)
    if v.shape[0] != A.shape[0]:
        raise ValueError(f"dimensiones incompatibles: {A.shape} y {v.shape}")
    real_input = not np.iscomplexobj(A) and not np.iscomplexobj(v)
    scale = float(np.linalg.norm(A, "fro"))

    if is_hermitian(A):
        if not np.iscomplexobj(A) and is_tridiagonal(A):
            lam, U = symmetric_tridiag_eigen(np.diag(A).copy(), np.diag(A, -1).copy())
        else:
            lam, U = scipy.linalg.eigh((A + A.conj().T) / 2)
        bad = on_branch_cut(lam, scale)
        if np.any(bad):
            raise BranchCutViolation(f"Autovalor sobre (−∞, 0]: {lam[bad][0]:.6g}")
        if lam.min() < PIVOT_TOL * scale:
            raise SingularMatrix(f"autovalor mínimo {lam.min():.3e} despreciable")
        weights = 1.0 / np.sqrt(lam)
        proj = U.conj().T @ v
        proj = proj * (weights[:, None] if v.ndim == 2 else weights)
        return _maybe_real(U @ proj, real_input)

    Q, R = _schur_sqrt(A)
    pivots = np.abs(np.diag(R))
    if pivots.min() < PIVOT_TOL * float(np.linalg.norm(R, "fro")):
        raise SingularMatrix(f"pivote {pivots.min():.3e} despreciable")
    y = scipy.linalg.solve_triangular(R, Q.conj().T @ v, lower=False)
    return _maybe_real(Q @ y, real_input)


# ═══════════════════════════════════════════════════════════════════════════
# AUTOVALORES TRIDIAGONALES
# ═══════════════════════════════════════════════════════════════════════════

def symmetric_tridiag_eigen(
    diag: np.ndarray,
    offdiag: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Autovalores (ascendentes) y autovectores de tridiag(offdiag, diag, offdiag).

    Args:
        diag: diagonal (n)
        offdiag: subdiagonal (n − 1)

    Raises:
        ValueError: longitudes incompatibles
        NonConvergence: si LAPACK no converge

    Example:
        >>> symmetric_tridiag_eigen(np.array([2.0, 2.0]), np.array([-1.0]))[0]
        array([1., 3.])
    """
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    if offdiag.shape[0] != max(diag.shape[0] - 1, 0):
        raise ValueError(
            f"offdiag debe tener longitud {diag.shape[0] - 1}, tiene {offdiag.shape[0]}"
        )
    if diag.shape[0] == 1:
        return diag.copy(), np.ones((1, 1))
    try:
        return scipy.linalg.eigh_tridiagonal(diag, offdiag)
    except scipy.linalg.LinAlgError as e:
        raise NonConvergence(f"eigh_tridiagonal no convergió: {e}") from e


# ═══════════════════════════════════════════════════════════════════════════
# MÍNIMOS CUADRADOS
# ═══════════════════════════════════════════════════════════════════════════

def lstsq(B: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """
    Minimizador de ‖rhs − B·x‖₂ por QR económico.

    Si las columnas de B son ortonormales el resultado coincide con B*·rhs.

    Raises:
        ValueError: si B tiene más columnas que filas
        RankDeficient: pivote |r_ii| < 1e−13·‖B‖_F
    """
    B = np.asarray(B)
    rhs = np.asarray(rhs)
    if B.ndim != 2 or B.shape[0] < B.shape[1]:
        raise ValueError(f"B debe tener filas ≥ columnas, shape={B.shape}")
    if rhs.shape[0] != B.shape[0]:
        raise ValueError(f"dimensiones incompatibles: {B.shape} y {rhs.shape}")

    Q, R = scipy.linalg.qr(B, mode="economic")
    pivots = np.abs(np.diag(R))
    if pivots.size and pivots.min() < RANK_TOL * float(np.linalg.norm(B, "fro")):
        raise RankDeficient(f"pivote {pivots.min():.3e}: B sin rango completo")
    return scipy.linalg.solve_triangular(R, Q.conj().T @ rhs, lower=False)


__all__ = [
    "SchurForm",
    "hessenberg_schur",
    "dense_sqrtm",
    "dense_inv_sqrtm_times",
    "symmetric_tridiag_eigen",
    "lstsq",
    "is_hermitian",
    "is_tridiagonal",
    "on_branch_cut",
]
