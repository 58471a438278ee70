"""
Lectura y escritura de archivos Matrix Market (.mtx).

Sólo formato coordinate; campos real / complex / integer / pattern y
simetrías general / symmetric / skew-symmetric / hermitian. Índices
1-based en disco, 0-based en memoria. Los errores de sintaxis llevan el
número de línea.
"""

from pathlib import Path
from typing import List, Tuple

import numpy as np
import scipy.io
import scipy.sparse as sp

from src.operators.linear_operator import as_csr
from src.utils.errors import IoError, ParseError, UnsupportedField
from src.utils.logger import get_logger

logger = get_logger(__name__)

BANNER = "%%matrixmarket"
FIELDS = ("real", "complex", "integer", "pattern")
SYMMETRIES = ("general", "symmetric", "skew-symmetric", "hermitian")


def _parse_banner(line: str) -> Tuple[str, str]:
    tokens = line.strip().lower().split()
    if len(tokens) != 5 or tokens[0] != BANNER:
        raise ParseError("banner Matrix Market inválido", line=1)
    _, obj, fmt, field, symmetry = tokens
    if obj != "matrix":
        raise UnsupportedField(f"objeto no soportado: {obj}")
    if fmt != "coordinate":
        raise UnsupportedField(f"formato no soportado: {fmt} (sólo coordinate)")
    if field not in FIELDS:
        raise UnsupportedField(f"campo no soportado: {field}")
    if symmetry not in SYMMETRIES:
        raise UnsupportedField(f"simetría no soportada: {symmetry}")
    return field, symmetry


def _parse_int(token: str, line_no: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"entero inválido: {token!r}", line=line_no) from None


def _parse_float(token: str, line_no: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"número inválido: {token!r}", line=line_no) from None


def read_matrix_market(path: Path) -> sp.csr_matrix:
    """
    Lee una matriz cuadrada en formato coordinate.

    Las simetrías se expanden (se almacena la matriz completa) y las entradas
    pattern valen 1.

    Args:
        path: ruta al archivo .mtx

    Returns:
        Matriz CSR canónica

    Raises:
        IoError: si el archivo no se puede leer
        ParseError: error de sintaxis (con número de línea)
        UnsupportedField: formato array u otras variantes no soportadas

    Example:
        >>> A = read_matrix_market(Path("data/graphs/example.mtx"))
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise IoError(f"no se pudo leer {path}: {e}") from e

    lines = text.splitlines()
    if not lines:
        raise ParseError("archivo vacío", line=1)
    field, symmetry = _parse_banner(lines[0])

    # ───────────────────────────────────────────────────────────────────────
    # Línea de tamaño (primera no comentario)
    # ───────────────────────────────────────────────────────────────────────
    line_no = 1
    size_tokens: List[str] = []
    for line_no in range(2, len(lines) + 1):
        stripped = lines[line_no - 1].strip()
        if stripped and not stripped.startswith("%"):
            size_tokens = stripped.split()
            break
    if len(size_tokens) != 3:
        raise ParseError("se esperaba 'filas columnas nnz'", line=line_no)
    n_rows, n_cols, nnz = (_parse_int(t, line_no) for t in size_tokens)
    if n_rows != n_cols:
        raise ParseError(f"la matriz debe ser cuadrada ({n_rows}×{n_cols})", line=line_no)
    size_line = line_no

    n_values = {"pattern": 0, "complex": 2}.get(field, 1)
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.ones(nnz, dtype=complex if field == "complex" else float)

    # ───────────────────────────────────────────────────────────────────────
    # Entradas
    # ───────────────────────────────────────────────────────────────────────
    count = 0
    for line_no in range(size_line + 1, len(lines) + 1):
        stripped = lines[line_no - 1].strip()
        if not stripped or stripped.startswith("%"):
            continue
        tokens = stripped.split()
        if len(tokens) != 2 + n_values:
            raise ParseError(
                f"se esperaban {2 + n_values} campos, hay {len(tokens)}", line=line_no
            )
        if count >= nnz:
            raise ParseError(f"más de {nnz} entradas declaradas", line=line_no)
        i, j = _parse_int(tokens[0], line_no), _parse_int(tokens[1], line_no)
        if not (1 <= i <= n_rows and 1 <= j <= n_cols):
            raise ParseError(f"índice fuera de rango: ({i}, {j})", line=line_no)
        rows[count], cols[count] = i - 1, j - 1
        if field == "complex":
            vals[count] = complex(_parse_float(tokens[2], line_no), _parse_float(tokens[3], line_no))
        elif field != "pattern":
            vals[count] = _parse_float(tokens[2], line_no)
        count += 1

    if count != nnz:
        raise ParseError(f"se declararon {nnz} entradas y hay {count}", line=len(lines))

    # ───────────────────────────────────────────────────────────────────────
    # Expansión de simetría
    # ───────────────────────────────────────────────────────────────────────
    if symmetry != "general":
        off = rows != cols
        mirrored = vals[off]
        if symmetry == "skew-symmetric":
            mirrored = -mirrored
        elif symmetry == "hermitian":
            mirrored = np.conj(mirrored)
        rows, cols, vals = (
            np.concatenate([rows, cols[off]]),
            np.concatenate([cols, rows[off]]),
            np.concatenate([vals, mirrored]),
        )

    A = sp.coo_matrix((vals, (rows, cols)), shape=(n_rows, n_cols))
    logger.debug("matrix market leído", path=str(path), n=n_rows, nnz=A.nnz,
                 field=field, symmetry=symmetry)
    return as_csr(A)


def write_matrix_market(path: Path, A: sp.spmatrix, comment: str = "") -> Path:
    """
    Escribe A en formato coordinate general (17 dígitos significativos).

    Raises:
        IoError: si el archivo no se puede escribir
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        scipy.io.mmwrite(str(path), sp.coo_matrix(A), comment=comment,
                         field="complex" if np.iscomplexobj(A.data) else "real",
                         precision=17, symmetry="general")
    except OSError as e:
        raise IoError(f"no se pudo escribir {path}: {e}") from e
    # scipy agrega la extensión .mtx si falta
    return path if path.suffix == ".mtx" else path.with_name(path.name + ".mtx")


__all__ = ["read_matrix_market", "write_matrix_market"]
