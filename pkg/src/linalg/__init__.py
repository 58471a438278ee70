"""
Núcleos densos: Schur, raíz cuadrada principal, autovalores tridiagonales y
mínimos cuadrados.
"""

from src.linalg.dense import (
    SchurForm,
    hessenberg_schur,
    dense_sqrtm,
    dense_inv_sqrtm_times,
    symmetric_tridiag_eigen,
    lstsq,
)

__all__ = [
    "SchurForm",
    "hessenberg_schur",
    "dense_sqrtm",
    "dense_inv_sqrtm_times",
    "symmetric_tridiag_eigen",
    "lstsq",
]
