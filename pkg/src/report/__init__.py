"""
Salidas de un escenario.

Genera:
- <label>.csv: historial de convergencia por corrida
- summary.csv / summary.txt: tabla resumen (iteraciones, mvms, productos internos, tiempo)
"""

from src.report.convergence import (
    atomic_write_text,
    convergence_frame,
    emit_convergence_csv,
)
from src.report.summary import render_summary, summary_frame, write_summary

__all__ = [
    # Convergencia
    "atomic_write_text",
    "convergence_frame",
    "emit_convergence_csv",

    # Resumen
    "summary_frame",
    "write_summary",
    "render_summary",
]
