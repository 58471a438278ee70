"""
Tabla resumen de un escenario: d, iteraciones, mvms, productos internos,
tiempo, estimador final, error real final y (si se pidió) κ, ε y κ_pre.
"""

from pathlib import Path
from typing import List, Sequence, Tuple

import pandas as pd
from rich.console import Console
from rich.table import Table

from src.models.schemas import ConvergenceReport, ResultRow
from src.report.convergence import FLOAT_FORMAT, atomic_write_text
from src.utils.logger import get_logger

logger = get_logger(__name__)

SUMMARY_COLUMNS = [
    "label", "method", "poly_kind", "d", "iterations", "mvms", "inner_products",
    "wall_time", "final_est", "final_true_err", "termination",
    "kappa", "epsilon", "kappa_pre_bound", "kappa_pre_actual",
]


def summary_frame(reports: Sequence[ConvergenceReport]) -> pd.DataFrame:
    """Una fila por corrida, ordenada por d (estable)."""
    rows = [ResultRow.from_report(r).model_dump() for r in reports]
    frame = pd.DataFrame(rows, columns=SUMMARY_COLUMNS)
    return frame.sort_values("d", kind="stable").reset_index(drop=True)


def write_summary(
    reports: Sequence[ConvergenceReport],
    output_dir: Path,
    stem: str = "summary"
) -> Tuple[Path, Path]:
    """
    Escribe summary.csv y summary.txt (texto alineado).

    Raises:
        IoError: error de escritura
    """
    frame = summary_frame(reports)
    csv_path = atomic_write_text(
        output_dir / f"{stem}.csv",
        frame.to_csv(index=False, float_format=FLOAT_FORMAT, na_rep="nan", lineterminator="\n"),
    )
    text_path = atomic_write_text(
        output_dir / f"{stem}.txt",
        frame.to_string(index=False, na_rep="-") + "\n",
    )
    logger.info(f"Resumen escrito: {csv_path} ({len(frame)} corridas)")
    return csv_path, text_path


def _fmt(value) -> str:
    if value is None or (isinstance(value, float) and value != value):
        return "-"
    if isinstance(value, float):
        return f"{value:.3e}"
    return str(value)


def render_summary(reports: Sequence[ConvergenceReport], console: Console, title: str = "") -> None:
    """Tabla rich en consola."""
    frame = summary_frame(reports)
    table = Table(title=title or None, show_lines=False)
    columns: List[str] = [
        "d", "method", "poly_kind", "iterations", "mvms", "inner_products",
        "final_est", "final_true_err", "termination",
    ]
    for col in columns:
        table.add_column(col, justify="right" if col not in ("method", "poly_kind", "termination") else "left")

    for row in frame.itertuples(index=False):
        values = row._asdict()
        style = "green" if values["termination"] in ("converged", "breakdown") else "yellow"
        table.add_row(*(_fmt(values[c]) for c in columns), style=style)

    console.print(table)


__all__ = ["summary_frame", "write_summary", "render_summary", "SUMMARY_COLUMNS"]
