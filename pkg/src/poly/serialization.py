"""
Formato de texto plano para polinomios precondicionadores.

Cada archivo empieza con una cabecera y una línea ``kind``; los números se
escriben con 17 dígitos significativos y los complejos como "re im".

    # polyprec polynomial v1
    kind chebyshev
    interval 1.0 8.0
    coeffs 3
    0.5
    ...
"""

from pathlib import Path
from typing import Iterator, List, Tuple, Union

import numpy as np

from src.poly.base import PrecondPoly
from src.poly.chebyshev import ChebyshevPoly
from src.poly.contour_ls import ContourLSPoly
from src.poly.newton import NewtonPoly
from src.utils.errors import IoError, PolynomialFormatError

HEADER = "# polyprec polynomial v1"


def _fmt(x: complex) -> str:
    return f"{np.real(x):.17g} {np.imag(x):.17g}"


def _vector_lines(name: str, values: np.ndarray) -> List[str]:
    values = np.ravel(values)
    if np.iscomplexobj(values):
        return [f"{name} {values.size} complex"] + [_fmt(x) for x in values]
    return [f"{name} {values.size} real"] + [f"{x:.17g}" for x in values]


def dumps_polynomial(q: PrecondPoly) -> str:
    """Serializa q a texto."""
    lines = [HEADER, f"kind {q.kind.value}", f"degree {q.degree}"]
    if isinstance(q, ChebyshevPoly):
        lines.append(f"interval {q.a:.17g} {q.b:.17g}")
        lines += _vector_lines("coeffs", q.coeffs)
    elif isinstance(q, NewtonPoly):
        lines += _vector_lines("nodes", q.nodes)
        lines += _vector_lines("divided_diffs", q.divided_diffs)
    elif isinstance(q, ContourLSPoly):
        rows, cols = q.H_small.shape
        lines.append(f"shape {rows} {cols}")
        lines += _vector_lines("nodes", q.nodes)
        lines += _vector_lines("H_small", q.H_small)
        lines += _vector_lines("alpha", q.alpha)
    else:
        raise TypeError(f"tipo de polinomio no serializable: {type(q).__name__}")
    return "\n".join(lines) + "\n"


class _Reader:
    """Cursor sobre las líneas no vacías, con número de línea para los errores."""

    def __init__(self, text: str):
        self._lines: Iterator[Tuple[int, str]] = (
            (i, line.strip())
            for i, line in enumerate(text.splitlines(), start=1)
            if line.strip() and not line.startswith("#")
        )
        self.lineno = 0

    def next(self) -> List[str]:
        try:
            self.lineno, line = next(self._lines)
        except StopIteration:
            raise PolynomialFormatError("fin de archivo inesperado", line=self.lineno)
        return line.split()

    def keyword(self, name: str) -> List[str]:
        tokens = self.next()
        if tokens[0] != name:
            raise PolynomialFormatError(
                f"se esperaba '{name}', se encontró '{tokens[0]}'", line=self.lineno
            )
        return tokens[1:]

    def floats(self, tokens: List[str], count: int) -> List[float]:
        if len(tokens) != count:
            raise PolynomialFormatError(
                f"se esperaban {count} números, hay {len(tokens)}", line=self.lineno
            )
        try:
            return [float(t) for t in tokens]
        except ValueError:
            raise PolynomialFormatError(f"número inválido en {tokens}", line=self.lineno)

    def vector(self, name: str) -> np.ndarray:
        tokens = self.keyword(name)
        if len(tokens) != 2 or tokens[1] not in ("real", "complex"):
            raise PolynomialFormatError(
                f"cabecera de '{name}' inválida: {tokens}", line=self.lineno
            )
        try:
            size = int(tokens[0])
        except ValueError:
            raise PolynomialFormatError(f"tamaño inválido: {tokens[0]}", line=self.lineno)
        if tokens[1] == "real":
            return np.array([self.floats(self.next(), 1)[0] for _ in range(size)])
        pairs = [self.floats(self.next(), 2) for _ in range(size)]
        return np.array([complex(re, im) for re, im in pairs], dtype=complex)


def loads_polynomial(text: str) -> PrecondPoly:
    """
    Reconstruye un polinomio desde texto.

    Raises:
        PolynomialFormatError: cabecera, tipo o números inválidos
    """
    if not text.startswith(HEADER):
        raise PolynomialFormatError("falta la cabecera de polinomio", line=1)

    reader = _Reader(text)
    kind = reader.keyword("kind")
    if len(kind) != 1:
        raise PolynomialFormatError("línea 'kind' inválida", line=reader.lineno)
    degree_tokens = reader.keyword("degree")
    degree = int(reader.floats(degree_tokens, 1)[0])

    if kind[0] == "chebyshev":
        a, b = reader.floats(reader.keyword("interval"), 2)
        q: PrecondPoly = ChebyshevPoly(a=a, b=b, coeffs=reader.vector("coeffs"))
    elif kind[0] == "ritz_newton":
        nodes = reader.vector("nodes")
        q = NewtonPoly(nodes=nodes, divided_diffs=reader.vector("divided_diffs"))
    elif kind[0] == "contour_ls":
        rows, cols = (int(x) for x in reader.floats(reader.keyword("shape"), 2))
        nodes = reader.vector("nodes")
        H = reader.vector("H_small")
        if H.size != rows * cols:
            raise PolynomialFormatError(
                f"H_small tiene {H.size} entradas, se esperaban {rows * cols}",
                line=reader.lineno,
            )
        q = ContourLSPoly(nodes=nodes, H_small=H.reshape(rows, cols), alpha=reader.vector("alpha"))
    else:
        raise PolynomialFormatError(f"tipo de polinomio desconocido: {kind[0]}", line=reader.lineno)

    if q.degree != degree:
        raise PolynomialFormatError(
            f"grado declarado {degree} ≠ grado de los datos {q.degree}", line=reader.lineno
        )
    return q


def save_polynomial(q: PrecondPoly, path: Union[str, Path]) -> Path:
    """Escribe q en ``path`` (crea el directorio si hace falta)."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps_polynomial(q), encoding="utf-8")
    except OSError as e:
        raise IoError(f"no se pudo escribir {path}: {e}") from e
    return path


def load_polynomial(path: Union[str, Path]) -> PrecondPoly:
    """
    Lee un polinomio guardado con ``save_polynomial``.

    Raises:
        IoError: archivo ilegible
        PolynomialFormatError: contenido inválido
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise IoError(f"no se pudo leer {path}: {e}") from e
    return loads_polynomial(text)


__all__ = [
    "dumps_polynomial",
    "loads_polynomial",
    "save_polynomial",
    "load_polynomial",
]
