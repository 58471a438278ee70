"""
Módulo de logging estructurado.

Configura structlog para que cada corrida deje trazas con contexto
(etiqueta, método, grado) legibles en consola o en JSON. El contexto de la
corrida se liga con ``run_context`` y viaja en contextvars, así que los
checkpoints que registra el driver lo heredan sin pasarlo a mano.
"""

import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional

import structlog

QUIET_LOGGERS = ("joblib", "matplotlib", "numba")


# ═══════════════════════════════════════════════════════════════════════════
# CONFIGURACIÓN DE STRUCTLOG
# ═══════════════════════════════════════════════════════════════════════════

def configure_logging(
    level: str = "INFO",
    log_file: Optional[Path] = None,
    json_logs: bool = False
) -> None:
    """
    Configura el sistema de logging.

    Los logs van a stderr para no mezclarse con la tabla resumen que el CLI
    imprime en stdout. Puede llamarse más de una vez; los handlers previos
    se reemplazan.

    Args:
        level: Nivel de logging (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Ruta opcional para guardar logs en archivo
        json_logs: Si True, una línea JSON por evento

    Example:
        >>> configure_logging(level="DEBUG", log_file=Path("logs/polyprec.log"))
    """
    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=getattr(logging, level.upper()),
        force=True,
    )
    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)

    processors = [
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.add_log_level,
        structlog.stdlib.add_logger_name,
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
    ]

    if json_logs:
        processors.append(structlog.processors.JSONRenderer())
    else:
        processors.append(structlog.dev.ConsoleRenderer(colors=sys.stderr.isatty()))

    structlog.configure(
        processors=processors,
        wrapper_class=structlog.stdlib.BoundLogger,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=False,
    )

    if log_file:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(
            logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
        )
        logging.getLogger().addHandler(file_handler)


def configure_from_settings(verbose: bool = False) -> None:
    """Aplica LOG_LEVEL / LOG_JSON / LOG_FILE de Settings (``verbose`` fuerza DEBUG)."""
    from src.config.settings import get_settings

    settings = get_settings()
    configure_logging(
        level="DEBUG" if verbose else settings.LOG_LEVEL,
        log_file=settings.LOG_FILE,
        json_logs=settings.LOG_JSON,
    )


@contextmanager
def run_context(**context) -> Iterator[None]:
    """
    Liga ``context`` a todos los eventos emitidos dentro del bloque.

    Example:
        >>> with run_context(run="left_prec_chebyshev_d8", d=8):
        ...     compute_action(op, b, "invsqrt", cfg)
    """
    with structlog.contextvars.bound_contextvars(**context):
        yield


def get_logger(name: str) -> structlog.stdlib.BoundLogger:
    """
    Obtiene un logger estructurado.

    Args:
        name: Nombre del logger (usualmente __name__ del módulo)

    Returns:
        Logger configurado

    Example:
        >>> logger = get_logger(__name__)
        >>> logger.debug("checkpoint", m=64, est=3.2e-11)
    """
    return structlog.get_logger(name)


# ═══════════════════════════════════════════════════════════════════════════
# INICIALIZACIÓN POR DEFECTO
# ═══════════════════════════════════════════════════════════════════════════

configure_logging(level="INFO", json_logs=False)
