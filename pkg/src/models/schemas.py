"""
Modelos Pydantic de polyprec.

Estos modelos definen los contratos de datos entre módulos (configuración de
corridas, reportes de convergencia, análisis de condición y archivos de
escenario) y garantizan validación de tipos en runtime.
"""

from pathlib import Path
from typing import List, Optional, Tuple
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


# ═══════════════════════════════════════════════════════════════════════════
# ENUMS
# ═══════════════════════════════════════════════════════════════════════════

class Method(str, Enum):
    """Variante del método de Arnoldi."""
    PLAIN = "plain"              # Sin precondicionar
    LEFT_PREC = "left_prec"      # q(A)²A actuando sobre c = q(A)b
    RIGHT_PREC = "right_prec"    # Aq(A)² actuando sobre b, iterado Y_m·coeffs


class PolyKind(str, Enum):
    """Representación del polinomio precondicionador q ≈ z^{-1/2}."""
    CHEBYSHEV = "chebyshev"      # Serie de Chebyshev en [a, b]
    RITZ_NEWTON = "ritz_newton"  # Interpolación en valores de Ritz (forma de Newton)
    CONTOUR_LS = "contour_ls"    # Mínimos cuadrados sobre un contorno
    NONE = "none"


class ChebyshevFit(str, Enum):
    """Cómo se obtienen los coeficientes de Chebyshev de z^{-1/2}."""
    SERIES = "series"                # Serie truncada (cuadratura de Gauss)
    INTERPOLATION = "interpolation"  # Interpolante en d nodos de Chebyshev


class FunctionKind(str, Enum):
    """Función de matriz aplicada al vector."""
    INVSQRT = "invsqrt"
    SQRT = "sqrt"
    SIGN = "sign"


class Termination(str, Enum):
    """Motivo de término de una corrida."""
    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    BREAKDOWN = "breakdown"      # Breakdown afortunado: la aproximación es exacta
    STAGNATION = "stagnation"


class ModelFamily(str, Enum):
    """Familias de problemas modelo."""
    LAPLACE1D = "laplace1d"
    LAPLACE2D = "laplace2d"
    LAPLACE3D = "laplace3d"
    GRAPH_IN_DEGREE_LAPLACIAN = "graph_in_degree_laplacian"
    SYNTHETIC_NONHERMITIAN = "synthetic_nonhermitian"


class RhsKind(str, Enum):
    """Lado derecho b."""
    RANDOM = "random"            # Normal estándar i.i.d., normalizado
    UNIT = "unit"                # e_i
    ONES = "ones"


# ═══════════════════════════════════════════════════════════════════════════
# CONFIGURACIÓN DE CORRIDAS
# ═══════════════════════════════════════════════════════════════════════════

class RunConfig(BaseModel):
    """
    Configuración de una corrida de Arnoldi/Lanczos.

    Attributes:
        method: plain | left_prec | right_prec
        poly_kind: chebyshev | ritz_newton | contour_ls | none
        d: grado del polinomio + 1 (d = 1 ⇔ sin precondicionar)
        max_iter: máximo de iteraciones de Arnoldi
        tol: objetivo para ‖f_{m+k}−f_m‖/‖f_{m+k}‖
        check_every: k, espaciado de checkpoints (None → max(1, 64 // d))
        reorth: segunda pasada de Gram–Schmidt modificado
        seed: semilla (None → la del escenario)
        harmonic: usar valores de Ritz armónicos como nodos
        random_start: arrancar el Arnoldi de Ritz con un vector aleatorio
        store_y: (right_prec) guardar y_j = q(A)v_j; False → modo memoria
        lanczos: (plain) usar la recurrencia de tres términos
        two_pass: (plain + lanczos) no guardar la base y regenerarla al final
        spectral_interval: [a, b] para Chebyshev (None → forma cerrada o estimación)
        chebyshev_fit: series (serie truncada) | interpolation (interpolante en d nodos)
        contour_min_abs / contour_step: parámetros del contorno (None → Settings)
        contour_ritz_steps: pasos del Arnoldi que da los valores de Ritz del contorno
        label: nombre de la corrida en los archivos de salida
    """

    model_config = ConfigDict(use_enum_values=True, frozen=True, extra="forbid")

    method: Method = Method.LEFT_PREC
    poly_kind: PolyKind = PolyKind.CHEBYSHEV
    d: int = Field(..., ge=1, le=512, description="Grado del polinomio + 1")
    max_iter: int = Field(default=1000, ge=1)
    tol: float = Field(default=1e-10, gt=0.0, lt=1.0)
    check_every: Optional[int] = Field(default=None, ge=1)
    reorth: bool = False
    seed: Optional[int] = Field(default=None, ge=0)
    harmonic: bool = False
    random_start: bool = False
    store_y: bool = True
    lanczos: bool = False
    two_pass: bool = False
    spectral_interval: Optional[Tuple[float, float]] = None
    chebyshev_fit: ChebyshevFit = ChebyshevFit.SERIES
    contour_min_abs: Optional[float] = Field(default=None, gt=0.0)
    contour_step: Optional[float] = Field(default=None, gt=0.0)
    contour_ritz_steps: Optional[int] = Field(default=None, ge=2)
    label: Optional[str] = None

    @model_validator(mode="after")
    def validate_consistency(self) -> "RunConfig":
        """method = plain ⇔ poly_kind = none ⇔ d = 1."""
        plain = self.method == Method.PLAIN
        no_poly = self.poly_kind == PolyKind.NONE
        if not (plain == no_poly == (self.d == 1)):
            raise ValueError(
                f"Combinación inválida: method={self.method}, "
                f"poly_kind={self.poly_kind}, d={self.d} "
                "(plain ⇔ none ⇔ d = 1)"
            )
        if self.two_pass and not (plain and self.lanczos):
            raise ValueError("two_pass requiere method=plain y lanczos=true")
        if self.spectral_interval is not None:
            a, b = self.spectral_interval
            if not 0.0 < a < b:
                raise ValueError(f"spectral_interval inválido: [{a}, {b}]")
        return self

    def effective_check_every(self, budget: int = 64) -> int:
        """k = check_every o max(1, floor(budget/d))."""
        if self.check_every is not None:
            return self.check_every
        return max(1, budget // self.d)

    @property
    def run_label(self) -> str:
        """Etiqueta estable para nombres de archivo."""
        if self.label:
            return self.label
        suffix = "_harm" if self.harmonic else ""
        return f"{self.method}_{self.poly_kind}{suffix}_d{self.d}"


# ═══════════════════════════════════════════════════════════════════════════
# REPORTES
# ═══════════════════════════════════════════════════════════════════════════

class Checkpoint(BaseModel):
    """Una fila del historial de convergencia."""

    m: int = Field(..., ge=0, description="Dimensión de Krylov en el checkpoint")
    mvms_cumulative: int = Field(..., ge=0)
    est_rel_diff: float = Field(..., description="‖f_m − f_{m−k}‖/‖f_m‖")
    true_rel_err: Optional[float] = None


class MvmBreakdown(BaseModel):
    """
    Desglose de mvms (unidades: productos con A).

    total = setup + start + iterations + finalization
    """

    setup: int = Field(default=0, ge=0, description="Construcción del polinomio")
    start: int = Field(default=0, ge=0, description="Vector inicial (q(A)b, Ab)")
    iterations: int = Field(default=0, ge=0, description="Pasos de Arnoldi")
    finalization: int = Field(default=0, ge=0, description="q(A)V_m g, segunda pasada, A·w")
    per_iteration: int = Field(default=1, ge=1, description="mvms por paso de Arnoldi")

    @property
    def total(self) -> int:
        return self.setup + self.start + self.iterations + self.finalization


class BranchCertificate(BaseModel):
    """
    Certificado de rama: q no tiene ceros en el semiplano izquierdo muestreado.

    Attributes:
        checked_points: puntos evaluados (no se serializa)
        n_points: cantidad de puntos
        min_real_part: mínimo de Re q(z)
        satisfied: min_real_part > 0
        relative_condition_holds: |q(λ) − λ^{-1/2}| ≤ |λ^{-1/2}|/√2 en la muestra
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    checked_points: Optional[np.ndarray] = Field(default=None, exclude=True, repr=False)
    n_points: int = Field(..., ge=1)
    min_real_part: float
    satisfied: bool
    relative_condition_holds: bool


class ConditionEstimate(BaseModel):
    """
    Análisis de condición de A·q(A)².

    kappa_pre_bound = (1+2ε+ε²)/(1−2ε−ε²) si ε < √2−1, si no None
    (bound_applicable = False).
    """

    lambda_min: float = Field(..., gt=0.0)
    lambda_max: float = Field(..., gt=0.0)
    epsilon: float = Field(..., ge=0.0)
    kappa_pre_bound: Optional[float] = None
    kappa_pre_actual: Optional[float] = None
    bound_applicable: bool = True

    @property
    def kappa(self) -> float:
        """Número de condición de A."""
        return self.lambda_max / self.lambda_min


class ConvergenceReport(BaseModel):
    """
    Reporte de una corrida.

    Attributes:
        checkpoints: historial (m, mvms acumulados, estimador, error real)
        iterations: pasos de Arnoldi realizados (= dimensión final salvo truncamiento)
        mvms: total de productos con A (= mvm_breakdown.total)
        inner_products: total de productos internos (incluye el setup)
        termination: converged | max_iter | breakdown | stagnation
        branch_certificate: certificado del polinomio (None si no hay)
        condition: análisis de A·q(A)² (sólo con el bloque [condition] del escenario)
        wall_time: segundos (no forma parte de ninguna comparación)
    """

    model_config = ConfigDict(use_enum_values=True)

    label: str = ""
    function: FunctionKind = FunctionKind.INVSQRT
    method: Method = Method.PLAIN
    poly_kind: PolyKind = PolyKind.NONE
    d: int = Field(default=1, ge=1)
    d_effective: int = Field(default=1, ge=1)
    check_every: int = Field(default=1, ge=1)
    checkpoints: List[Checkpoint] = Field(default_factory=list)
    iterations: int = Field(default=0, ge=0)
    mvms: int = Field(default=0, ge=0)
    inner_products: int = Field(default=0, ge=0)
    mvm_breakdown: MvmBreakdown = Field(default_factory=MvmBreakdown)
    termination: Termination = Termination.CONVERGED
    branch_certificate: Optional[BranchCertificate] = None
    condition: Optional[ConditionEstimate] = None
    orthogonalization: str = "mgs"
    seed: Optional[int] = None
    wall_time: float = Field(default=0.0, ge=0.0)

    @property
    def converged(self) -> bool:
        """Convergió por tolerancia o por breakdown afortunado."""
        return self.termination in (Termination.CONVERGED, Termination.BREAKDOWN)

    @property
    def final_est(self) -> Optional[float]:
        return self.checkpoints[-1].est_rel_diff if self.checkpoints else None

    @property
    def final_true_err(self) -> Optional[float]:
        return self.checkpoints[-1].true_rel_err if self.checkpoints else None


class ResultRow(BaseModel):
    """Fila de la tabla resumen (iteraciones, mvms, productos internos, tiempo)."""

    label: str
    method: str
    poly_kind: str
    d: int
    iterations: int
    mvms: int
    inner_products: int
    wall_time: float
    final_est: Optional[float] = None
    final_true_err: Optional[float] = None
    termination: str
    kappa: Optional[float] = None
    epsilon: Optional[float] = None
    kappa_pre_bound: Optional[float] = None
    kappa_pre_actual: Optional[float] = None

    @classmethod
    def from_report(cls, report: ConvergenceReport) -> "ResultRow":
        condition = report.condition
        return cls(
            label=report.label,
            method=report.method,
            poly_kind=report.poly_kind,
            d=report.d,
            iterations=report.iterations,
            mvms=report.mvms,
            inner_products=report.inner_products,
            wall_time=report.wall_time,
            final_est=report.final_est,
            final_true_err=report.final_true_err,
            termination=report.termination,
            kappa=condition.kappa if condition else None,
            epsilon=condition.epsilon if condition else None,
            kappa_pre_bound=condition.kappa_pre_bound if condition else None,
            kappa_pre_actual=condition.kappa_pre_actual if condition else None,
        )


# ═══════════════════════════════════════════════════════════════════════════
# ARCHIVO DE ESCENARIO
# ═══════════════════════════════════════════════════════════════════════════

class MatrixSource(BaseModel):
    """Origen de la matriz: problema modelo o archivo .mtx."""

    model_config = ConfigDict(use_enum_values=True, extra="forbid")

    family: Optional[ModelFamily] = None
    path: Optional[Path] = None
    N: Optional[int] = Field(default=None, ge=1, description="Puntos por dirección (laplace*)")
    n: Optional[int] = Field(default=None, ge=2, description="Dimensión (grafo / sintética)")
    out_degree: int = Field(default=3, ge=1, description="Aristas salientes aleatorias por nodo")
    skew_scale: float = Field(default=0.5, ge=0.0, lt=1.0)
    shift: float = Field(default=1.0, gt=0.0)
    seed: Optional[int] = Field(default=None, ge=0)
    laplacian: bool = Field(
        default=False,
        description="Para .mtx: interpretar como adyacencia y formar L = D_in − A"
    )
    spectral_interval: Optional[Tuple[float, float]] = None

    @model_validator(mode="after")
    def validate_source(self) -> "MatrixSource":
        """Exactamente una de family / path, con sus parámetros."""
        if (self.family is None) == (self.path is None):
            raise ValueError("matrix: indicar exactamente uno de 'family' o 'path'")
        if self.family is not None and self.family.startswith("laplace") and self.N is None:
            raise ValueError(f"matrix: la familia {self.family} requiere N")
        if self.family in (ModelFamily.GRAPH_IN_DEGREE_LAPLACIAN,
                           ModelFamily.SYNTHETIC_NONHERMITIAN) and self.n is None:
            raise ValueError(f"matrix: la familia {self.family} requiere n")
        return self


class RhsSpec(BaseModel):
    """Lado derecho."""

    model_config = ConfigDict(use_enum_values=True, extra="forbid")

    kind: RhsKind = RhsKind.RANDOM
    index: int = Field(default=0, ge=0)


class OracleSpec(BaseModel):
    """Solución de referencia densa."""

    model_config = ConfigDict(extra="forbid")

    enabled: bool = False
    dense_limit: int = Field(default=2000, ge=1)


class ConditionSpec(BaseModel):
    """
    Análisis de condición de A·q(A)² por corrida (A hermitiana, invsqrt o sqrt).

    Agrega κ, ε, la cota de κ_pre y κ_pre real (denso si n ≤ dense_limit) a
    la tabla resumen.
    """

    model_config = ConfigDict(extra="forbid")

    enabled: bool = False
    dense_limit: int = Field(default=2500, ge=1)
    strict: bool = False


class GridSpec(BaseModel):
    """
    Malla de corridas que comparten todo salvo d.

    d = 1 se traduce en method=plain, poly_kind=none. ``check_every_budget``
    fija k = max(1, budget // d) (64 por defecto, 32 en el escenario de grafos).
    """

    model_config = ConfigDict(use_enum_values=True, extra="forbid")

    d: List[int] = Field(..., min_length=1)
    method: Method = Method.LEFT_PREC
    poly_kind: PolyKind = PolyKind.CHEBYSHEV
    tol: float = Field(default=1e-10, gt=0.0, lt=1.0)
    max_iter: int = Field(default=1000, ge=1)
    check_every_budget: Optional[int] = Field(default=None, ge=1)
    reorth: bool = False
    harmonic: bool = False
    random_start: bool = False
    store_y: bool = True
    lanczos: bool = False
    two_pass: bool = False
    chebyshev_fit: ChebyshevFit = ChebyshevFit.SERIES
    contour_min_abs: Optional[float] = Field(default=None, gt=0.0)
    contour_step: Optional[float] = Field(default=None, gt=0.0)
    contour_ritz_steps: Optional[int] = Field(default=None, ge=2)

    @field_validator('d')
    @classmethod
    def validate_degrees(cls, v: List[int]) -> List[int]:
        if any(d < 1 for d in v):
            raise ValueError(f"grid.d debe contener enteros ≥ 1: {v}")
        if len(set(v)) != len(v):
            raise ValueError(f"grid.d tiene valores repetidos: {v}")
        return v

    def expand(self) -> List[RunConfig]:
        """Una RunConfig por valor de d, ordenadas por d."""
        configs = []
        for d in sorted(self.d):
            plain = d == 1
            check_every = (
                max(1, self.check_every_budget // d)
                if self.check_every_budget is not None else None
            )
            # poly_kind sólo viaja si el escenario lo fijó (ver compute_action)
            kind = {"poly_kind": PolyKind.NONE} if plain else (
                {"poly_kind": self.poly_kind} if "poly_kind" in self.model_fields_set else {}
            )
            configs.append(RunConfig(
                method=Method.PLAIN if plain else self.method,
                d=d,
                tol=self.tol,
                max_iter=self.max_iter,
                check_every=check_every,
                reorth=self.reorth,
                harmonic=self.harmonic and not plain,
                random_start=self.random_start and not plain,
                store_y=self.store_y,
                lanczos=self.lanczos and plain,
                two_pass=self.two_pass and plain and self.lanczos,
                chebyshev_fit=self.chebyshev_fit,
                contour_min_abs=self.contour_min_abs,
                contour_step=self.contour_step,
                contour_ritz_steps=self.contour_ritz_steps,
                **kind,
            ))
        return configs


class ScenarioFile(BaseModel):
    """
    Escenario completo (TOML).

    Example:
        >>> scenario = ScenarioFile.model_validate(tomllib.loads(text))
        >>> configs = scenario.all_runs()
    """

    model_config = ConfigDict(use_enum_values=True, extra="forbid")

    name: str = Field(..., min_length=1)
    function: FunctionKind = FunctionKind.INVSQRT
    seed: int = Field(default=0, ge=0)
    output_dir: Optional[Path] = None
    matrix: MatrixSource
    rhs: RhsSpec = Field(default_factory=RhsSpec)
    oracle: OracleSpec = Field(default_factory=OracleSpec)
    condition: ConditionSpec = Field(default_factory=ConditionSpec)
    runs: List[RunConfig] = Field(default_factory=list)
    grid: Optional[GridSpec] = None

    @model_validator(mode="after")
    def validate_runs(self) -> "ScenarioFile":
        if not self.runs and self.grid is None:
            raise ValueError("el escenario no define corridas ([[runs]] o [grid])")
        labels = [cfg.run_label for cfg in self.all_runs()]
        duplicated = sorted({label for label in labels if labels.count(label) > 1})
        if duplicated:
            raise ValueError(f"etiquetas de corrida repetidas: {duplicated}")
        return self

    def all_runs(self, seed_override: Optional[int] = None) -> List[RunConfig]:
        """Corridas explícitas + malla, con la semilla resuelta."""
        seed = self.seed if seed_override is None else seed_override
        configs = list(self.runs)
        if self.grid is not None:
            configs.extend(self.grid.expand())
        resolved = []
        for cfg in configs:
            run_seed = cfg.seed if (cfg.seed is not None and seed_override is None) else seed
            resolved.append(cfg.model_copy(update={"seed": run_seed}))
        return resolved


__all__ = [
    "Method", "PolyKind", "ChebyshevFit", "FunctionKind", "Termination", "ModelFamily", "RhsKind",
    "RunConfig", "Checkpoint", "MvmBreakdown", "BranchCertificate",
    "ConvergenceReport", "ConditionEstimate", "ResultRow",
    "MatrixSource", "RhsSpec", "OracleSpec", "ConditionSpec", "GridSpec", "ScenarioFile",
]
