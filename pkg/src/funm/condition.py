"""
Análisis de condición del operador precondicionado A·q(A)².

Si |1 − √z·q(z)| ≤ ε en [λ_min, λ_max], los autovalores de A·q(A)² caen en
[1 − 2ε − ε², 1 + 2ε + ε²], de donde sale la cota de κ_pre.
"""

import math
from typing import Optional, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from src.config.settings import get_settings
from src.linalg.dense import is_hermitian
from src.models.schemas import ConditionEstimate
from src.operators.linear_operator import LinearOperator, PlainOperator
from src.poly.base import PrecondPoly
from src.poly.chebyshev import ChebyshevPoly
from src.utils.errors import EpsilonTooLarge
from src.utils.logger import get_logger

logger = get_logger(__name__)

EPSILON_LIMIT = math.sqrt(2.0) - 1.0


def kappa_bound(epsilon: float) -> Optional[float]:
    """(1+2ε+ε²)/(1−2ε−ε²) si ε < √2 − 1, si no None."""
    if epsilon >= EPSILON_LIMIT:
        return None
    return (1.0 + 2.0 * epsilon + epsilon ** 2) / (1.0 - 2.0 * epsilon - epsilon ** 2)


def relative_error(q: PrecondPoly, lambda_min: float, lambda_max: float, n_points: int) -> float:
    """ε = max |1 − √z·q(z)| sobre una grilla uniforme de [λ_min, λ_max]."""
    grid = np.linspace(lambda_min, lambda_max, n_points)
    return float(np.max(np.abs(1.0 - np.sqrt(grid) * q.evaluate(grid))))


def _dense_matrix(A: LinearOperator) -> np.ndarray:
    if isinstance(A, PlainOperator):
        M = A.matrix
        return M.toarray() if sp.issparse(M) else np.asarray(M)
    return A.detached().apply(np.eye(A.dim))


def condition_analysis(
    A: LinearOperator,
    q: PrecondPoly,
    spectral_interval: Optional[Tuple[float, float]] = None,
    dense_limit: Optional[int] = None,
    strict: bool = False
) -> ConditionEstimate:
    """
    ε, cota de κ_pre y (si n ≤ dense_limit) κ_pre real de A·q(A)².

    Args:
        A: operador hermitiano definido positivo
        q: polinomio (por defecto el intervalo sale de q si es Chebyshev)
        spectral_interval: [λ_min, λ_max]
        dense_limit: máximo n para el cálculo denso (None → Settings.DENSE_LIMIT)
        strict: levantar EpsilonTooLarge en lugar de sólo informar

    Returns:
        ConditionEstimate

    Raises:
        ValueError: sin intervalo y q no es Chebyshev
        EpsilonTooLarge: si ``strict`` y ε ≥ √2 − 1

    Example:
        >>> est = condition_analysis(op, chebyshev_invsqrt(lmin, lmax, 31, fit="interpolation"), dense_limit=2500)
        >>> round(est.epsilon, 4)
        0.1262
    """
    settings = get_settings()
    dense_limit = settings.DENSE_LIMIT if dense_limit is None else dense_limit

    if spectral_interval is None:
        if not isinstance(q, ChebyshevPoly):
            raise ValueError("se requiere spectral_interval para polinomios no Chebyshev")
        spectral_interval = q.interval
    lambda_min, lambda_max = (float(x) for x in spectral_interval)

    epsilon = relative_error(q, lambda_min, lambda_max, settings.CONDITION_GRID_POINTS)
    bound = kappa_bound(epsilon)
    if bound is None:
        message = f"ε = {epsilon:.4f} ≥ √2 − 1: la cota de κ_pre no es aplicable"
        logger.warning(message)
        if strict:
            raise EpsilonTooLarge(message)

    actual: Optional[float] = None
    if A.dim <= dense_limit:
        M = _dense_matrix(A)
        if is_hermitian(M):
            lam = scipy.linalg.eigvalsh((M + M.conj().T) / 2)
        else:
            lam = np.real(scipy.linalg.eigvals(M))
        values = lam * np.abs(q.evaluate(lam)) ** 2
        if values.min() > 0:
            actual = float(values.max() / values.min())
        else:
            actual = math.inf

    estimate = ConditionEstimate(
        lambda_min=lambda_min,
        lambda_max=lambda_max,
        epsilon=epsilon,
        kappa_pre_bound=bound,
        kappa_pre_actual=actual,
        bound_applicable=bound is not None,
    )
    logger.info(
        f"Condición: κ = {estimate.kappa:.4g}, ε = {epsilon:.4g}, "
        f"cota κ_pre = {bound}, κ_pre real = {actual}"
    )
    return estimate


__all__ = ["condition_analysis", "kappa_bound", "relative_error", "EPSILON_LIMIT"]
