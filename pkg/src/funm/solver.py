"""
Punto de entrada único: construye el polinomio según la RunConfig y llama al
driver que corresponde a la función y al método.
"""

from typing import Optional, Tuple

import numpy as np

from src.funm.drivers import (
    invsqrt_left_prec,
    invsqrt_plain,
    invsqrt_right_prec,
    sign_action,
    sqrt_action,
)
from src.models.schemas import ConvergenceReport, FunctionKind, Method, PolyKind, RunConfig
from src.operators.linear_operator import LinearOperator, SquaredOperator
from src.poly.factory import PolynomialSetup, build_polynomial
from src.utils.errors import BranchCutNode, BranchCutRitz
from src.utils.logger import get_logger

logger = get_logger(__name__)


def compute_action(
    A: LinearOperator,
    b: np.ndarray,
    function: str,
    cfg: RunConfig,
    interval: Optional[Tuple[float, float]] = None,
    reference: Optional[np.ndarray] = None,
    raise_on_stagnation: bool = False
) -> Tuple[np.ndarray, ConvergenceReport, Optional[PolynomialSetup]]:
    """
    f(A)·b con el método y el polinomio de ``cfg``.

    El polinomio aproxima z^{-1/2} sobre el espectro de A (invsqrt, sqrt) o
    de A² (sign); ``interval`` se refiere a ese mismo operador. Para sqrt con
    nodos de Ritz, el Arnoldi de Ritz arranca de A·b.

    Si poly_kind no se fijó explícitamente (chebyshev por defecto), A no es
    hermitiana y no hay intervalo, se usa ritz_newton.

    Args:
        A: operador con contadores nuevos
        b: vector
        function: invsqrt | sqrt | sign
        cfg: configuración de la corrida
        interval: intervalo espectral conocido (Chebyshev)
        reference: solución exacta para el error real por checkpoint
        raise_on_stagnation: levantar Stagnation en lugar de informarla

    Returns:
        (f, reporte, setup del polinomio o None)
    """
    function = FunctionKind(function)
    kind = PolyKind(cfg.poly_kind)
    setup: Optional[PolynomialSetup] = None

    if kind == PolyKind.CHEBYSHEV and interval is None and cfg.spectral_interval is None:
        target = SquaredOperator(A) if function == FunctionKind.SIGN else A
        if not target.is_hermitian and "poly_kind" not in cfg.model_fields_set:
            # chebyshev es sólo el valor por defecto: A no hermitiana pasa a Ritz
            logger.info(f"{cfg.run_label}: A no hermitiana sin intervalo, se usa ritz_newton")
            cfg = cfg.model_copy(update={"poly_kind": PolyKind.RITZ_NEWTON.value})
            kind = PolyKind.RITZ_NEWTON

    if kind != PolyKind.NONE:
        if function == FunctionKind.SIGN:
            poly_op, start = SquaredOperator(A), b
        elif function == FunctionKind.SQRT and kind != PolyKind.CHEBYSHEV and not cfg.random_start:
            poly_op, start = A, A.apply(b)
        else:
            poly_op, start = A, b

        try:
            setup = build_polynomial(
                poly_op, start, cfg,
                interval=interval,
                rng=np.random.default_rng(cfg.seed),
            )
        except BranchCutNode as e:
            if function == FunctionKind.SQRT:
                raise BranchCutRitz(str(e)) from e
            raise

    q = setup.poly if setup is not None else None

    if function == FunctionKind.SQRT:
        f, report = sqrt_action(A, b, q, cfg, reference, raise_on_stagnation)
    elif function == FunctionKind.SIGN:
        f, report = sign_action(A, b, q, cfg, reference, raise_on_stagnation)
    elif Method(cfg.method) == Method.LEFT_PREC:
        f, report = invsqrt_left_prec(A, b, q, cfg, reference, raise_on_stagnation)
    elif Method(cfg.method) == Method.RIGHT_PREC:
        f, report = invsqrt_right_prec(A, b, q, cfg, reference, raise_on_stagnation)
    else:
        f, report = invsqrt_plain(A, b, cfg, reference, raise_on_stagnation)

    return f, report, setup


__all__ = ["compute_action"]
