"""
Jerarquía de excepciones de polyprec.

Cada error nombrado hereda de `PolyprecError` y además de la excepción
estándar más cercana, de modo que el código cliente puede capturar
`ValueError` o `ArithmeticError` sin conocer la jerarquía.
"""

from typing import Optional


class PolyprecError(Exception):
    """Base de todos los errores del paquete."""


# ═══════════════════════════════════════════════════════════════════════════
# ÁLGEBRA LINEAL DENSA
# ═══════════════════════════════════════════════════════════════════════════

class NotHessenberg(PolyprecError, ValueError):
    """La matriz no es Hessenberg superior."""


class NonConvergence(PolyprecError, RuntimeError):
    """El algoritmo QR / de autovalores no convergió."""


class BranchCutViolation(PolyprecError, ValueError):
    """Autovalor sobre (−∞, 0]: la raíz principal no está definida."""


class ZeroDiagonalPair(PolyprecError, ArithmeticError):
    """La recurrencia de Parlett divide por una suma de raíces casi nula."""


class SingularMatrix(PolyprecError, ArithmeticError):
    """Pivote despreciable en la resolución triangular."""


class RankDeficient(PolyprecError, ArithmeticError):
    """La matriz del problema de mínimos cuadrados no tiene rango completo."""


# ═══════════════════════════════════════════════════════════════════════════
# OPERADORES
# ═══════════════════════════════════════════════════════════════════════════

class DimensionMismatch(PolyprecError, ValueError):
    """Longitud del vector distinta de la dimensión del operador."""


class SpectrumLeak(PolyprecError, ValueError):
    """La matriz sintética tiene un autovalor con parte real ≤ 0."""


class ParseError(PolyprecError, ValueError):
    """Error de sintaxis en un archivo Matrix Market."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"línea {line}: " if line is not None else ""
        super().__init__(prefix + message)


class UnsupportedField(PolyprecError, ValueError):
    """Variante de Matrix Market no soportada (p. ej. formato array)."""


# ═══════════════════════════════════════════════════════════════════════════
# KRYLOV
# ═══════════════════════════════════════════════════════════════════════════

class ZeroStartVector(PolyprecError, ValueError):
    """Vector inicial nulo."""


class SingularH(PolyprecError, ArithmeticError):
    """H_d singular al calcular valores de Ritz armónicos."""


# ═══════════════════════════════════════════════════════════════════════════
# POLINOMIOS
# ═══════════════════════════════════════════════════════════════════════════

class InvalidInterval(PolyprecError, ValueError):
    """Intervalo [a, b] no positivo o vacío."""


class BranchCutNode(PolyprecError, ValueError):
    """Nodo de interpolación sobre (−∞, 0]."""


class NearCoincidentNodes(PolyprecError, ValueError):
    """Nodos casi coincidentes: la interpolación está mal planteada."""


class DegenerateContour(PolyprecError, ValueError):
    """No se puede construir un contorno con los valores de Ritz dados."""


class NodeOnBranchCut(PolyprecError, ValueError):
    """Nodo del contorno discretizado sobre (−∞, 0]."""


class RecurrenceBreakdown(PolyprecError, ArithmeticError):
    """Coeficiente subdiagonal despreciable en la recurrencia de Arnoldi."""


class PolynomialFormatError(ParseError):
    """Archivo de polinomio serializado mal formado."""


# ═══════════════════════════════════════════════════════════════════════════
# FUNCIONES DE MATRICES
# ═══════════════════════════════════════════════════════════════════════════

class BranchCutRitz(PolyprecError, ValueError):
    """Un nodo del precondicionador cae sobre (−∞, 0] en el cálculo de la raíz."""


class EpsilonTooLarge(PolyprecError, ValueError):
    """ε ≥ √2 − 1: la cota de condicionamiento no es aplicable."""


class Stagnation(PolyprecError, RuntimeError):
    """El estimador de error dejó de decrecer."""


# ═══════════════════════════════════════════════════════════════════════════
# CLI
# ═══════════════════════════════════════════════════════════════════════════

class ConfigError(PolyprecError, ValueError):
    """Escenario inválido (exit code 64)."""


class IoError(PolyprecError, OSError):
    """Error de lectura/escritura de resultados (exit code 74)."""


__all__ = [
    "PolyprecError",
    "NotHessenberg", "NonConvergence", "BranchCutViolation", "ZeroDiagonalPair",
    "SingularMatrix", "RankDeficient",
    "DimensionMismatch", "SpectrumLeak", "ParseError", "UnsupportedField",
    "ZeroStartVector", "SingularH",
    "InvalidInterval", "BranchCutNode", "NearCoincidentNodes", "DegenerateContour",
    "NodeOnBranchCut", "RecurrenceBreakdown", "PolynomialFormatError",
    "BranchCutRitz", "EpsilonTooLarge", "Stagnation",
    "ConfigError", "IoError",
]
