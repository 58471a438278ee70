"""
Valores de Ritz y de Ritz armónicos de una descomposición de Krylov.

Los armónicos son los autovalores de H̃_d = H_d + h²·H_d^{-*}·e_d·e_d*; la
modificación sólo toca la última columna, así que H̃_d sigue siendo
Hessenberg y pasa por la misma ruta de Schur.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np
import scipy.linalg

from src.krylov.arnoldi import ArnoldiDecomposition
from src.krylov.lanczos import TridiagonalDecomposition
from src.linalg.dense import (
    hessenberg_schur,
    is_hermitian,
    is_tridiagonal,
    symmetric_tridiag_eigen,
)
from src.utils.errors import SingularH

SINGULAR_COND = 1e14
IMAG_CLEAN_TOL = 1e-14


class RitzKind(str, Enum):
    STANDARD = "standard"
    HARMONIC = "harmonic"


@dataclass(frozen=True)
class RitzSet:
    """Valores de Ritz (reales si todas las partes imaginarias son nulas)."""
    values: np.ndarray
    kind: RitzKind
    source_dim: int

    def __len__(self) -> int:
        return self.values.shape[0]


def _clean(values: np.ndarray, real_matrix: bool) -> np.ndarray:
    """Anula partes imaginarias de redondeo; devuelve array real si corresponde."""
    values = np.asarray(values, dtype=complex)
    scale = float(np.abs(values).max()) if values.size else 1.0
    tiny = np.abs(values.imag) <= IMAG_CLEAN_TOL * max(scale, 1.0)
    if real_matrix:
        values = np.where(tiny, values.real + 0j, values)
    if np.all(values.imag == 0):
        return values.real.copy()
    return values


def eigenvalues(H: np.ndarray) -> np.ndarray:
    """Autovalores de una Hessenberg pequeña por la ruta adecuada."""
    if is_hermitian(H):
        if not np.iscomplexobj(H) and is_tridiagonal(H):
            return symmetric_tridiag_eigen(np.diag(H).copy(), np.diag(H, -1).copy())[0]
        return scipy.linalg.eigh((H + H.conj().T) / 2, eigvals_only=True)
    return _clean(hessenberg_schur(H).eigenvalues, real_matrix=not np.iscomplexobj(H))


def ritz_values(
    dec: Union[ArnoldiDecomposition, TridiagonalDecomposition],
    kind: str = RitzKind.STANDARD
) -> RitzSet:
    """
    Valores de Ritz (estándar o armónicos) de la descomposición.

    Args:
        dec: descomposición de Arnoldi o Lanczos de dimensión d
        kind: standard | harmonic

    Returns:
        RitzSet con d valores

    Raises:
        SingularH: si kind = harmonic y H_d es singular
    """
    kind = RitzKind(kind)
    H = dec.H
    d = H.shape[0]

    if kind == RitzKind.HARMONIC and dec.h_next != 0.0:
        if np.linalg.cond(H) > SINGULAR_COND:
            raise SingularH(f"H_{d} es (numéricamente) singular")
        e_d = np.zeros(d)
        e_d[-1] = 1.0
        f = scipy.linalg.solve(H.conj().T, e_d)
        H_tilde = H.astype(np.result_type(H, f), copy=True)
        H_tilde[:, -1] += dec.h_next ** 2 * f
        values = eigenvalues(H_tilde)
    else:
        values = eigenvalues(H)

    return RitzSet(values=values, kind=kind, source_dim=d)


__all__ = ["RitzKind", "RitzSet", "ritz_values", "eigenvalues"]
