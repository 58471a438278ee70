"""
Polinomios precondicionadores q ≈ z^{-1/2}.
"""

from src.poly.base import PrecondPoly
from src.poly.branch import certify_branch
from src.poly.chebyshev import ChebyshevPoly, chebyshev_invsqrt, clenshaw_apply
from src.poly.contour_ls import (
    ContourLSPoly,
    build_contour,
    contour_ls_apply,
    contour_ls_poly,
)
from src.poly.factory import PolynomialSetup, build_polynomial, estimate_spectral_interval
from src.poly.newton import (
    NewtonPoly,
    divided_differences,
    leja_order,
    newton_apply,
    ritz_interp_poly,
)
from src.poly.serialization import (
    dumps_polynomial,
    load_polynomial,
    loads_polynomial,
    save_polynomial,
)

__all__ = [
    # Interfaz
    "PrecondPoly",
    # Chebyshev
    "ChebyshevPoly",
    "chebyshev_invsqrt",
    "clenshaw_apply",
    # Newton / Ritz
    "NewtonPoly",
    "leja_order",
    "divided_differences",
    "ritz_interp_poly",
    "newton_apply",
    # Contorno
    "ContourLSPoly",
    "build_contour",
    "contour_ls_poly",
    "contour_ls_apply",
    # Certificado y construcción
    "certify_branch",
    "PolynomialSetup",
    "build_polynomial",
    "estimate_spectral_interval",
    # Serialización
    "dumps_polynomial",
    "loads_polynomial",
    "save_polynomial",
    "load_polynomial",
]
