"""
Pipeline principal de experimentos.

Este módulo orquesta un escenario completo: Escenario → Problema → Corridas → Salidas
"""

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import numpy as np
import scipy.sparse as sp
from joblib import Parallel, delayed
from pydantic import ValidationError
from tqdm import tqdm

from src.config.settings import get_settings
from src.funm.condition import condition_analysis
from src.funm.reference import reference_solution
from src.funm.solver import compute_action
from src.models.schemas import (
    ConditionEstimate,
    ConditionSpec,
    ConvergenceReport,
    FunctionKind,
    ModelFamily,
    RunConfig,
    ScenarioFile,
    Termination,
)
from src.operators.linear_operator import PlainOperator
from src.operators.matrix_market import read_matrix_market
from src.operators.model_problems import (
    laplace_spectral_interval,
    make_graph_laplacian,
    make_model_problem,
    make_rhs,
)
from src.poly.factory import PolynomialSetup
from src.poly.serialization import save_polynomial
from src.report.convergence import emit_convergence_csv
from src.report.summary import write_summary
from src.utils.errors import ConfigError, IoError, PolyprecError
from src.utils.logger import get_logger, run_context

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_NOT_CONVERGED = 2
EXIT_CONFIG = 64
EXIT_IO = 74


@dataclass
class Problem:
    """Matriz, lado derecho y datos derivados de un escenario."""
    matrix: sp.csr_matrix
    b: np.ndarray
    interval: Optional[Tuple[float, float]] = None
    reference: Optional[np.ndarray] = None


@dataclass
class ScenarioResult:
    """Reportes de todas las corridas y archivos escritos."""
    scenario: ScenarioFile
    output_dir: Path
    reports: List[ConvergenceReport] = field(default_factory=list)
    failed: List[str] = field(default_factory=list)

    @property
    def all_converged(self) -> bool:
        return not self.failed and all(r.converged for r in self.reports)

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.all_converged else EXIT_NOT_CONVERGED


# ═══════════════════════════════════════════════════════════════════════════
# ESCENARIO
# ═══════════════════════════════════════════════════════════════════════════

def load_scenario(path: Union[str, Path]) -> ScenarioFile:
    """
    Lee y valida un escenario TOML.

    Raises:
        IoError: archivo ilegible
        ConfigError: TOML inválido o escenario que no valida
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise IoError(f"no se pudo leer el escenario {path}: {e}") from e

    try:
        data = tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as e:
        raise ConfigError(f"{path}: TOML inválido: {e}") from e

    try:
        scenario = ScenarioFile.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"{path}: escenario inválido:\n{e}") from e

    if scenario.matrix.path is not None and not scenario.matrix.path.is_absolute():
        scenario = scenario.model_copy(update={
            "matrix": scenario.matrix.model_copy(update={"path": path.parent / scenario.matrix.path})
        })
    return scenario


def build_problem(scenario: ScenarioFile, seed: int) -> Problem:
    """
    Matriz, b, intervalo espectral y (si hay oráculo) solución de referencia.

    El intervalo se refiere al operador que aproxima q: A para invsqrt/sqrt,
    A² para sign.

    Raises:
        ConfigError: oráculo activado con n > dense_limit
    """
    source = scenario.matrix
    matrix_seed = source.seed if source.seed is not None else seed

    if source.path is not None:
        matrix = read_matrix_market(source.path)
        if source.laplacian:
            matrix = make_graph_laplacian(matrix)
    else:
        matrix = make_model_problem(
            source.family,
            N=source.N,
            n=source.n,
            seed=matrix_seed,
            out_degree=source.out_degree,
            skew_scale=source.skew_scale,
            shift=source.shift,
        )

    n = matrix.shape[0]
    b = make_rhs(n, scenario.rhs.kind, seed, scenario.rhs.index)

    interval = tuple(source.spectral_interval) if source.spectral_interval else None
    if interval is None and source.family in (
        ModelFamily.LAPLACE1D, ModelFamily.LAPLACE2D, ModelFamily.LAPLACE3D
    ):
        a, c = laplace_spectral_interval(source.family, source.N)
        interval = (a * a, c * c) if scenario.function == FunctionKind.SIGN else (a, c)

    reference = None
    if scenario.oracle.enabled:
        if n > scenario.oracle.dense_limit:
            raise ConfigError(
                f"oráculo activado con n = {n} > dense_limit = {scenario.oracle.dense_limit}"
            )
        reference = reference_solution(
            matrix, b, scenario.function, dense_limit=scenario.oracle.dense_limit
        )

    logger.info(f"Problema: n={n}, nnz={matrix.nnz}, intervalo={interval}")
    return Problem(matrix=matrix, b=b, interval=interval, reference=reference)


# ═══════════════════════════════════════════════════════════════════════════
# CORRIDAS
# ═══════════════════════════════════════════════════════════════════════════

def condition_for_run(
    problem: Problem,
    function: str,
    setup: PolynomialSetup,
    block: ConditionSpec
) -> Optional[ConditionEstimate]:
    """
    κ, ε y κ_pre de A·q(A)² para el polinomio de una corrida.

    Sólo para A hermitiana con invsqrt o sqrt; el intervalo es el del
    polinomio (Chebyshev) o el del problema.

    Raises:
        EpsilonTooLarge: con ``block.strict`` y ε ≥ √2 − 1
    """
    if FunctionKind(function) == FunctionKind.SIGN:
        logger.info("Análisis de condición omitido: q aproxima sobre A², no sobre A")
        return None
    A = PlainOperator(problem.matrix)
    if not A.is_hermitian:
        logger.warning("Análisis de condición omitido: A no es hermitiana")
        return None
    interval = setup.interval or problem.interval
    if interval is None:
        logger.warning("Análisis de condición omitido: sin intervalo espectral")
        return None
    return condition_analysis(
        A, setup.poly,
        spectral_interval=interval,
        dense_limit=block.dense_limit,
        strict=block.strict,
    )


def execute_run(
    problem: Problem,
    function: str,
    cfg: RunConfig,
    output_dir: Path,
    condition: Optional[ConditionSpec] = None
) -> Optional[ConvergenceReport]:
    """
    Una corrida con contadores propios; escribe <label>.csv y <label>.poly.

    Con ``condition.enabled`` el reporte lleva además el análisis de A·q(A)².

    Los errores numéricos se registran y devuelven None; los de E/S se propagan.
    """
    A = PlainOperator(problem.matrix)
    try:
        with run_context(run=cfg.run_label, d=cfg.d):
            _, report, setup = compute_action(
                A, problem.b, function, cfg,
                interval=problem.interval,
                reference=problem.reference,
            )
            if condition is not None and condition.enabled and setup is not None:
                report.condition = condition_for_run(problem, function, setup, condition)
    except IoError:
        raise
    except PolyprecError as e:
        logger.error(f"Corrida {cfg.run_label} falló: {type(e).__name__}: {e}")
        return None

    emit_convergence_csv(report, output_dir / f"{report.label}.csv")
    if setup is not None:
        save_polynomial(setup.poly, output_dir / f"{report.label}.poly")
    return report


def run_scenario(
    path: Union[str, Path],
    output_dir: Optional[Path] = None,
    jobs: Optional[int] = None,
    show_progress: bool = True
) -> ScenarioResult:
    """
    Ejecuta todas las corridas de un escenario.

    Flujo:
    1. Carga y validación del TOML
    2. Construcción de la matriz, b y la referencia
    3. Corridas (en paralelo con joblib si jobs > 1)
    4. CSV por corrida, polinomio por corrida y tabla resumen

    Args:
        path: archivo TOML
        output_dir: directorio de salida (prioridad sobre el escenario)
        jobs: corridas en paralelo (None → Settings.NUM_WORKERS)
        show_progress: barra de progreso tqdm

    Returns:
        ScenarioResult (``exit_code``: 0 si todo convergió, 2 si no)

    Raises:
        ConfigError: escenario inválido
        IoError: error de lectura/escritura

    Example:
        >>> result = run_scenario(Path("scenarios/laplace2d_golden.toml"))
        >>> result.exit_code
        0
    """
    settings = get_settings()
    scenario = load_scenario(path)
    seed = settings.POLYPREC_SEED if settings.POLYPREC_SEED is not None else scenario.seed
    configs = scenario.all_runs(seed_override=settings.POLYPREC_SEED)
    jobs = jobs or settings.NUM_WORKERS

    output_dir = Path(
        output_dir or scenario.output_dir or settings.DATA_OUTPUT_DIR / scenario.name
    )

    logger.info("=" * 80)
    logger.info(f"INICIANDO ESCENARIO: {scenario.name} ({len(configs)} corridas, jobs={jobs})")
    logger.info("=" * 80)

    # ───────────────────────────────────────────────────────────────────────
    # FASE 1: PROBLEMA
    # ───────────────────────────────────────────────────────────────────────
    try:
        problem = build_problem(scenario, seed)
    except (ValueError, PolyprecError) as e:
        if isinstance(e, (ConfigError, IoError)):
            raise
        raise ConfigError(f"no se pudo construir el problema: {e}") from e

    # ───────────────────────────────────────────────────────────────────────
    # FASE 2: CORRIDAS
    # ───────────────────────────────────────────────────────────────────────
    iterator = tqdm(configs, desc=scenario.name, unit="corrida", disable=not show_progress)
    if jobs == 1:
        outcomes = [execute_run(problem, scenario.function, cfg, output_dir, scenario.condition)
            for cfg in iterator
        ]
    else:
        outcomes = Parallel(n_jobs=jobs)(
            delayed(execute_run)(problem, scenario.function, cfg, output_dir, scenario.condition)
            for cfg in iterator
        )

    result = ScenarioResult(scenario=scenario, output_dir=output_dir)
    for cfg, report in zip(configs, outcomes):
        if report is None:
            result.failed.append(cfg.run_label)
        else:
            result.reports.append(report)

    # ───────────────────────────────────────────────────────────────────────
    # FASE 3: RESUMEN
    # ───────────────────────────────────────────────────────────────────────
    if result.reports:
        write_summary(result.reports, output_dir)

    not_converged = [
        r.label for r in result.reports
        if r.termination in (Termination.MAX_ITER, Termination.STAGNATION)
    ]
    logger.info("=" * 80)
    logger.info(
        f"ESCENARIO COMPLETADO: {len(result.reports)} corridas, "
        f"{len(not_converged)} sin converger, {len(result.failed)} fallidas"
    )
    logger.info(f"Salida: {output_dir}")
    logger.info("=" * 80)

    return result


__all__ = [
    "Problem",
    "ScenarioResult",
    "load_scenario",
    "build_problem",
    "condition_for_run",
    "execute_run",
    "run_scenario",
    "EXIT_OK",
    "EXIT_NOT_CONVERGED",
    "EXIT_CONFIG",
    "EXIT_IO",
]
