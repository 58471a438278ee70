"""
Construcción del polinomio precondicionador a partir de una RunConfig.

El costo en mvms de esta etapa (Arnoldi de Ritz o Lanczos para estimar el
intervalo) queda en los contadores del operador y se informa como "setup".
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.config.settings import get_settings
from src.krylov.arnoldi import arnoldi
from src.krylov.lanczos import lanczos
from src.krylov.ritz import RitzKind, RitzSet, eigenvalues, ritz_values
from src.models.schemas import PolyKind, RunConfig
from src.operators.linear_operator import LinearOperator
from src.poly.base import PrecondPoly
from src.poly.chebyshev import chebyshev_invsqrt
from src.poly.contour_ls import contour_ls_poly
from src.poly.newton import ritz_interp_poly
from src.utils.errors import ConfigError, InvalidInterval
from src.utils.logger import get_logger

logger = get_logger(__name__)

INTERVAL_MARGIN = 0.05


@dataclass
class PolynomialSetup:
    """Polinomio construido y los datos que lo originaron."""
    poly: PrecondPoly
    ritz: Optional[RitzSet] = None
    interval: Optional[Tuple[float, float]] = None

    @property
    def d_effective(self) -> int:
        return self.poly.d


def estimate_spectral_interval(
    op: LinearOperator,
    start: np.ndarray,
    steps: Optional[int] = None
) -> Tuple[float, float]:
    """
    Intervalo [a, b] a partir de valores de Ritz de Lanczos (op hermitiano).

    Los extremos se ensanchan un 5%; el mínimo de Ritz sobreestima λ_min,
    así que a puede quedar por encima del espectro en problemas mal
    condicionados.

    Raises:
        ConfigError: si op no es hermitiano (Lanczos no da un intervalo)
        InvalidInterval: si el valor de Ritz mínimo no es positivo
    """
    if not op.is_hermitian:
        raise ConfigError(
            "chebyshev sin spectral_interval requiere A hermitiana; "
            "usar poly_kind = ritz_newton o contour_ls"
        )
    steps = steps or get_settings().INTERVAL_LANCZOS_STEPS
    steps = min(steps, op.dim)
    dec = lanczos(op, start, steps, store_basis=False)
    theta = np.sort(np.real(eigenvalues(dec.H)))
    a = theta[0] * (1.0 - INTERVAL_MARGIN)
    b = theta[-1] * (1.0 + INTERVAL_MARGIN)
    if not a > 0:
        raise InvalidInterval(f"Ritz mínimo no positivo: {theta[0]:.3e}")
    if not b > a:
        b = a * (1.0 + 2 * INTERVAL_MARGIN)
    logger.info(f"Intervalo espectral estimado con {dec.m} pasos de Lanczos: [{a:.4e}, {b:.4e}]")
    return float(a), float(b)


def build_polynomial(
    op: LinearOperator,
    start: np.ndarray,
    cfg: RunConfig,
    interval: Optional[Tuple[float, float]] = None,
    rng: Optional[np.random.Generator] = None
) -> PolynomialSetup:
    """
    Construye q de grado cfg.d − 1 para el operador ``op``.

    Args:
        op: operador cuyo espectro aproxima q (A, o A² para sign)
        start: vector inicial del Arnoldi de Ritz (b, o A·b para sqrt)
        cfg: configuración de la corrida (poly_kind ≠ none)
        interval: intervalo conocido (forma cerrada) para Chebyshev
        rng: generador para ``random_start``

    Returns:
        PolynomialSetup. Si el Arnoldi de Ritz termina antes de d pasos, el
        grado se reduce al número de valores de Ritz disponibles.

    Raises:
        ConfigError: chebyshev sin intervalo sobre un operador no hermitiano
        InvalidInterval, BranchCutNode, NearCoincidentNodes,
        DegenerateContour, NodeOnBranchCut, SingularH
    """
    kind = PolyKind(cfg.poly_kind)
    if kind == PolyKind.NONE:
        raise ValueError("build_polynomial requiere poly_kind ≠ none")
    degree = cfg.d - 1

    # ─── CHEBYSHEV ─────────────────────────────────────────────────────────
    if kind == PolyKind.CHEBYSHEV:
        if cfg.spectral_interval is not None:
            interval = tuple(cfg.spectral_interval)
        elif interval is None:
            interval = estimate_spectral_interval(op, start)
        a, b = interval
        poly = chebyshev_invsqrt(a, b, degree, fit=cfg.chebyshev_fit)
        return PolynomialSetup(poly=poly, interval=(a, b))

    # ─── RITZ ──────────────────────────────────────────────────────────────
    if cfg.random_start:
        rng = rng or np.random.default_rng(cfg.seed)
        start = rng.standard_normal(op.dim)

    ritz_kind = RitzKind.HARMONIC if cfg.harmonic else RitzKind.STANDARD

    if kind == PolyKind.RITZ_NEWTON:
        dec = arnoldi(op, start, cfg.d, reorth=cfg.reorth)
        ritz = ritz_values(dec, ritz_kind)
        if dec.m < cfg.d:
            logger.warning(
                f"Arnoldi de Ritz terminó en {dec.m} pasos: grado reducido "
                f"de {degree} a {dec.m - 1}"
            )
        poly = ritz_interp_poly(ritz)
    else:
        # El contorno sale de un Arnoldi más largo que d; el grado no depende de él
        steps = cfg.contour_ritz_steps or get_settings().CONTOUR_RITZ_STEPS
        dec = arnoldi(op, start, min(max(steps, cfg.d), op.dim), reorth=cfg.reorth)
        ritz = ritz_values(dec, ritz_kind)
        if dec.m - 1 < degree:
            logger.warning(
                f"Arnoldi del contorno terminó en {dec.m} pasos: grado reducido "
                f"de {degree} a {dec.m - 1}"
            )
        poly = contour_ls_poly(
            ritz,
            degree=min(degree, dec.m - 1),
            min_abs=cfg.contour_min_abs,
            step=cfg.contour_step,
        )

    logger.debug(
        "polinomio de Ritz construido",
        kind=kind.value,
        ritz=ritz_kind.value,
        n_ritz=len(ritz),
        degree=poly.degree,
    )
    return PolynomialSetup(poly=poly, ritz=ritz)


__all__ = ["PolynomialSetup", "build_polynomial", "estimate_spectral_interval"]
