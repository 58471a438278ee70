"""
CSV de convergencia por corrida.

Una fila por checkpoint: m, mvms_cumulative, est_rel_diff y, si la corrida
tuvo oráculo, true_rel_err. Los números van con 17 dígitos significativos
y la escritura es atómica (archivo temporal + os.replace).
"""

import os
import tempfile
from pathlib import Path
from typing import Union

import pandas as pd

from src.models.schemas import ConvergenceReport
from src.utils.errors import IoError
from src.utils.logger import get_logger

logger = get_logger(__name__)

FLOAT_FORMAT = "%.17g"
CONVERGENCE_COLUMNS = ["m", "mvms_cumulative", "est_rel_diff", "true_rel_err"]


def atomic_write_text(path: Union[str, Path], content: str) -> Path:
    """
    Escribe ``content`` en ``path`` vía un temporal en el mismo directorio.

    Raises:
        IoError: si falla la escritura o el reemplazo
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
                handle.write(content)
            os.replace(tmp_name, path)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise
    except OSError as e:
        raise IoError(f"no se pudo escribir {path}: {e}") from e
    return path


def convergence_frame(report: ConvergenceReport) -> pd.DataFrame:
    """Checkpoints como DataFrame (true_rel_err sólo si hay oráculo)."""
    if not report.checkpoints:
        raise ValueError(f"el reporte {report.label!r} no tiene checkpoints")
    frame = pd.DataFrame([cp.model_dump() for cp in report.checkpoints])
    frame = frame[CONVERGENCE_COLUMNS]
    if frame["true_rel_err"].isna().all():
        frame = frame.drop(columns="true_rel_err")
    return frame


def emit_convergence_csv(report: ConvergenceReport, path: Union[str, Path]) -> Path:
    """
    Escribe el historial de convergencia como CSV UTF-8.

    Args:
        report: reporte con al menos un checkpoint
        path: destino

    Returns:
        Path escrito

    Raises:
        ValueError: reporte sin checkpoints
        IoError: error de escritura

    Example:
        >>> emit_convergence_csv(report, Path("out/left_prec_chebyshev_d32.csv"))
    """
    frame = convergence_frame(report)
    content = frame.to_csv(index=False, float_format=FLOAT_FORMAT, na_rep="nan", lineterminator="\n")
    written = atomic_write_text(path, content)
    logger.debug("CSV de convergencia escrito", path=str(written), rows=len(frame))
    return written


__all__ = [
    "atomic_write_text",
    "convergence_frame",
    "emit_convergence_csv",
    "FLOAT_FORMAT",
]
