"""
Configuración global de polyprec usando Pydantic Settings.

Variables cargadas desde el entorno o un archivo .env, con defaults sensatos.
"""

from pathlib import Path
from typing import Literal, Optional
from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field, field_validator


class Settings(BaseSettings):
    """
    Configuración global de polyprec.

    Variables se cargan desde:
    1. Variables de entorno
    2. Archivo .env (si existe)
    3. Valores por defecto (definidos aquí)

    Example:
        >>> from src.config.settings import get_settings
        >>> settings = get_settings()
        >>> settings.BREAKDOWN_TOL
        1e-14
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore"
    )

    # ═══════════════════════════════════════════════════════════════════════
    # SEMILLAS
    # ═══════════════════════════════════════════════════════════════════════

    POLYPREC_SEED: Optional[int] = Field(
        default=None,
        ge=0,
        description="Si está definida, reemplaza la semilla de todos los escenarios"
    )

    # ═══════════════════════════════════════════════════════════════════════
    # PATHS
    # ═══════════════════════════════════════════════════════════════════════

    DATA_OUTPUT_DIR: Path = Field(
        default=Path("data/output"),
        description="Directorio de salida cuando ni --out ni el escenario lo fijan"
    )

    # ═══════════════════════════════════════════════════════════════════════
    # KRYLOV
    # ═══════════════════════════════════════════════════════════════════════

    BREAKDOWN_TOL: float = Field(
        default=1e-14,
        gt=0.0,
        lt=1e-6,
        description="Tolerancia relativa de breakdown afortunado en Arnoldi/Lanczos"
    )

    DEFAULT_TOL: float = Field(
        default=1e-10,
        gt=0.0,
        description="Tolerancia por defecto del estimador ‖f_{m+k}−f_m‖/‖f_{m+k}‖"
    )

    DEFAULT_MAX_ITER: int = Field(
        default=1000,
        ge=1,
        description="Máximo de iteraciones por defecto"
    )

    CHECK_EVERY_BUDGET: int = Field(
        default=64,
        ge=1,
        description="k = max(1, floor(budget/d)) cuando check_every no está fijado"
    )

    # ═══════════════════════════════════════════════════════════════════════
    # ESTANCAMIENTO
    # ═══════════════════════════════════════════════════════════════════════

    STAGNATION_FACTOR: float = Field(
        default=0.99,
        description="Reducción mínima exigida entre checkpoints consecutivos"
    )

    STAGNATION_WINDOW: int = Field(
        default=3,
        ge=1,
        description="Checkpoints consecutivos sin reducción antes de declarar estancamiento"
    )

    STAGNATION_ONSET: float = Field(
        default=100.0,
        ge=1.0,
        description="La detección empieza cuando est ≤ ONSET × tol"
    )

    # ═══════════════════════════════════════════════════════════════════════
    # POLINOMIOS
    # ═══════════════════════════════════════════════════════════════════════

    BRANCH_GRID_POINTS: int = Field(
        default=1000,
        ge=2,
        description="Puntos equiespaciados para certificar la rama en intervalos"
    )

    CONDITION_GRID_POINTS: int = Field(
        default=10000,
        ge=2,
        description="Puntos de la malla para estimar ε en el análisis de condición"
    )

    CONTOUR_MIN_ABS: float = Field(
        default=0.1,
        gt=0.0,
        description="Radio mínimo del contorno para mínimos cuadrados"
    )

    CONTOUR_STEP: float = Field(
        default=0.005,
        gt=0.0,
        description="Paso uniforme (longitud de arco) del contorno discretizado"
    )

    CONTOUR_RITZ_STEPS: int = Field(
        default=60,
        ge=2,
        description="Pasos de Arnoldi cuyos valores de Ritz definen el contorno (independiente de d)"
    )

    INTERVAL_LANCZOS_STEPS: int = Field(
        default=60,
        ge=2,
        description="Pasos de Lanczos para estimar el intervalo espectral"
    )

    # ═══════════════════════════════════════════════════════════════════════
    # ORÁCULO DENSO
    # ═══════════════════════════════════════════════════════════════════════

    DENSE_LIMIT: int = Field(
        default=2000,
        ge=1,
        description="Dimensión máxima para soluciones de referencia densas"
    )

    # ═══════════════════════════════════════════════════════════════════════
    # LOGGING
    # ═══════════════════════════════════════════════════════════════════════

    LOG_LEVEL: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(
        default="INFO",
        description="Nivel de logging"
    )

    LOG_JSON: bool = Field(
        default=False,
        description="Usar formato JSON en logs (producción)"
    )

    LOG_FILE: Optional[Path] = Field(
        default=None,
        description="Ruta al archivo de log (opcional)"
    )

    # ═══════════════════════════════════════════════════════════════════════
    # PERFORMANCE
    # ═══════════════════════════════════════════════════════════════════════

    NUM_WORKERS: int = Field(
        default=1,
        ge=1,
        le=64,
        description="Corridas en paralelo por defecto (--jobs)"
    )

    # ═══════════════════════════════════════════════════════════════════════
    # VALIDATORS
    # ═══════════════════════════════════════════════════════════════════════

    @field_validator('STAGNATION_FACTOR')
    @classmethod
    def validate_stagnation_factor(cls, v: float) -> float:
        """El factor de estancamiento debe estar en (0, 1]."""
        if not 0.0 < v <= 1.0:
            raise ValueError(f"STAGNATION_FACTOR ({v}) debe estar en (0, 1]")
        return v

    @field_validator('CONTOUR_STEP')
    @classmethod
    def validate_contour_step(cls, v: float, info) -> float:
        """El paso del contorno debe ser menor que el radio mínimo."""
        min_abs = info.data.get('CONTOUR_MIN_ABS', 0.1)
        if v >= min_abs:
            raise ValueError(
                f"CONTOUR_STEP ({v}) debe ser < CONTOUR_MIN_ABS ({min_abs})"
            )
        return v

    def check_every_for(self, d: int) -> int:
        """Espaciado de checkpoints por defecto para un grado d."""
        return max(1, self.CHECK_EVERY_BUDGET // d)


# ═══════════════════════════════════════════════════════════════════════════
# SINGLETON PATTERN
# ═══════════════════════════════════════════════════════════════════════════

_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """
    Obtiene la instancia global de Settings (singleton).

    Returns:
        Settings: Configuración global
    """
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def reload_settings() -> Settings:
    """
    Recarga settings desde el entorno / .env (útil para tests).

    Returns:
        Settings: Nueva instancia de configuración
    """
    global _settings
    _settings = Settings()
    return _settings


# ═══════════════════════════════════════════════════════════════════════════
# EXPORTS
# ═══════════════════════════════════════════════════════════════════════════

__all__ = ["Settings", "get_settings", "reload_settings"]
