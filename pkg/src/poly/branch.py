"""
Certificado de rama de un polinomio precondicionador.

q(A)·A^{1/2} sólo representa la rama principal si Re q(λ) > 0 en el espectro;
se verifica sobre una muestra de puntos (intervalo, nodos de Ritz o de contorno).
"""

from typing import Optional

import numpy as np

from src.config.settings import get_settings
from src.models.schemas import BranchCertificate
from src.poly.base import PrecondPoly
from src.utils.errors import BranchCutRitz
from src.utils.logger import get_logger

logger = get_logger(__name__)


def certify_branch(
    q: PrecondPoly,
    sample: Optional[np.ndarray] = None,
    strict: bool = False
) -> BranchCertificate:
    """
    Evalúa q en la muestra y verifica Re q(z) > 0.

    Además informa la condición relativa |q(z) − z^{-1/2}| ≤ |z^{-1/2}|/√2,
    que es suficiente para el corte de rama.

    Args:
        q: polinomio
        sample: puntos (None → ``q.certification_sample``)
        strict: levantar BranchCutRitz si el certificado falla

    Returns:
        BranchCertificate

    Raises:
        BranchCutRitz: si ``strict`` y min Re q(z) ≤ 0
    """
    if sample is None:
        sample = q.certification_sample(get_settings().BRANCH_GRID_POINTS)
    points = np.asarray(sample)
    if points.size == 0:
        raise ValueError("la muestra de certificación está vacía")

    values = q.evaluate(points)
    min_real = float(np.min(np.real(values)))
    target = 1.0 / np.sqrt(points.astype(complex))
    relative = bool(np.all(np.abs(values - target) <= np.abs(target) / np.sqrt(2.0)))

    certificate = BranchCertificate(
        checked_points=points,
        n_points=int(points.size),
        min_real_part=min_real,
        satisfied=min_real > 0.0,
        relative_condition_holds=relative,
    )

    if not certificate.satisfied:
        logger.warning(
            f"Certificado de rama fallido: min Re q(z) = {min_real:.3e} "
            f"en {points.size} puntos"
        )
        if strict:
            raise BranchCutRitz(f"min Re q(z) = {min_real:.3e} ≤ 0")

    return certificate


__all__ = ["certify_branch"]
