"""
Módulo Krylov: Arnoldi (MGS con reortogonalización opcional), Lanczos,
Lanczos de dos pasadas y extracción de valores de Ritz.
"""

from src.krylov.arnoldi import ArnoldiDecomposition, ArnoldiProcess, arnoldi
from src.krylov.lanczos import (
    TridiagonalDecomposition,
    LanczosProcess,
    lanczos,
    two_pass_lanczos_combine,
)
from src.krylov.ritz import RitzKind, RitzSet, ritz_values

__all__ = [
    "ArnoldiDecomposition",
    "ArnoldiProcess",
    "arnoldi",
    "TridiagonalDecomposition",
    "LanczosProcess",
    "lanczos",
    "two_pass_lanczos_combine",
    "RitzKind",
    "RitzSet",
    "ritz_values",
]
