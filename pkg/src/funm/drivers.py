"""
Drivers de Arnoldi (sin precondicionar y con precondicionamiento polinomial
por izquierda o por derecha) para A^{-1/2}b, A^{1/2}b y sign(A)b.

Todas las variantes comparten el mismo esquema:

    1. Vector inicial (q(A)b por izquierda, b por derecha o sin precondicionar)
    2. Arnoldi/Lanczos sobre el operador, con un checkpoint cada k pasos
    3. En cada checkpoint g_m = H_m^{-1/2}·e_1·β y el estimador
       ‖f_m − f_{m−k}‖/‖f_m‖
    4. Iterado final: V_m g_m, Y_m g_m, q(A)·V_m g_m o segunda pasada de Lanczos

El estimador sale de los coeficientes cuando la base es ortonormal; con
precondicionamiento por derecha y Y_m guardada se calcula con los iterados
explícitos.
"""

import math
import time
from typing import Callable, List, Optional, Tuple

import numpy as np

from src.config.settings import get_settings
from src.krylov.arnoldi import ArnoldiProcess
from src.krylov.lanczos import LanczosProcess, two_pass_lanczos_combine
from src.linalg.dense import dense_inv_sqrtm_times, on_branch_cut
from src.models.schemas import (
    Checkpoint,
    ConvergenceReport,
    FunctionKind,
    Method,
    MvmBreakdown,
    PolyKind,
    RunConfig,
    Termination,
)
from src.operators.linear_operator import (
    LinearOperator,
    PreconditionedOperator,
    SquaredOperator,
)
from src.poly.base import PrecondPoly
from src.poly.branch import certify_branch
from src.utils.errors import BranchCutRitz, BranchCutViolation, SingularMatrix, Stagnation
from src.utils.logger import get_logger

logger = get_logger(__name__)

ErrorFn = Callable[[np.ndarray], float]


# ═══════════════════════════════════════════════════════════════════════════
# ITERACIÓN CON CHECKPOINTS
# ═══════════════════════════════════════════════════════════════════════════

class InvSqrtIteration:
    """
    Una corrida de Krylov para base^{-1/2}·rhs.

    Args:
        base: operador cuya raíz inversa se aplica (A, o A² para sign)
        rhs: vector
        q: polinomio (None sin precondicionar)
        cfg: configuración de la corrida
    """

    def __init__(
        self,
        base: LinearOperator,
        rhs: np.ndarray,
        q: Optional[PrecondPoly],
        cfg: RunConfig
    ):
        self.base = base
        self.rhs = rhs
        self.q = q
        self.cfg = cfg
        self.method = Method(cfg.method)
        self.settings = get_settings()
        self.check_every = cfg.effective_check_every(self.settings.CHECK_EVERY_BUDGET)
        self.checkpoints: List[Checkpoint] = []
        self.g: Optional[np.ndarray] = None

        if self.method != Method.PLAIN and q is None:
            raise ValueError(f"method={self.method.value} requiere un polinomio")

        self.stores_y = self.method == Method.RIGHT_PREC and cfg.store_y
        self.memory_mode = self.method == Method.RIGHT_PREC and not cfg.store_y

    @property
    def m(self) -> int:
        return self.process.m

    @property
    def orthogonalization(self) -> str:
        if self.cfg.lanczos:
            return "lanczos-2pass" if self.cfg.two_pass else "lanczos"
        return "mgs2" if self.cfg.reorth else "mgs"

    # ─── 1. vector inicial ──────────────────────────────────────────────────
    def prepare(self) -> None:
        """Arma el operador iterado y el vector inicial (cuenta mvms)."""
        if self.method == Method.LEFT_PREC:
            self.op: LinearOperator = PreconditionedOperator(self.base, self.q, "left")
            self.start = self.q.apply(self.base, self.rhs)
        elif self.method == Method.RIGHT_PREC:
            self.op = PreconditionedOperator(
                self.base, self.q, "right", keep_intermediates=self.stores_y
            )
            self.start = self.rhs
        else:
            self.op = self.base
            self.start = self.rhs

        if self.cfg.lanczos:
            self.process = LanczosProcess(
                self.op, self.start, store_basis=not self.cfg.two_pass
            )
        else:
            self.process = ArnoldiProcess(self.op, self.start, reorth=self.cfg.reorth)

    # ─── 2-3. iteración ─────────────────────────────────────────────────────
    def coefficients(self) -> np.ndarray:
        """
        g_m = H_m^{-1/2}·e_1·β.

        Si H_m tiene un autovalor espurio sobre (−∞, 0] detrás de un
        subdiagonal despreciable (breakdown que el redondeo ocultó), la base
        se trunca en ese punto y g se calcula sobre el subespacio invariante.
        """
        try:
            return self._solve(self.process.hessenberg())
        except (BranchCutViolation, SingularMatrix):
            k = self.process.deflation_point()
            if k is None:
                raise
            logger.warning(
                f"Autovalor espurio en H_{self.process.m}: "
                f"base truncada a m={k} (breakdown no detectado)"
            )
            self.process.truncate(k)
            return self._solve(self.process.hessenberg())

    def _solve(self, H: np.ndarray) -> np.ndarray:
        e1 = np.zeros(H.shape[0], dtype=H.dtype)
        e1[0] = self.process.beta
        return dense_inv_sqrtm_times(H, e1)

    def iterate(self, g: np.ndarray, counted: bool = True) -> np.ndarray:
        """f_m a partir de g_m; con ``counted=False`` las mvms no cuentan."""
        m = g.shape[0]
        if self.cfg.two_pass:
            op = self.op if counted else self.op.detached()
            return two_pass_lanczos_combine(op, self.start, m, g)
        if self.stores_y:
            return np.column_stack(self.op.intermediates[:m]) @ g

        x = np.column_stack(self.process.vectors[:m]) @ g
        if self.memory_mode:
            base = self.base if counted else self.base.detached()
            return self.q.apply(base, x)
        return x

    def estimate(self, g: np.ndarray, previous: np.ndarray) -> float:
        """‖f_m − f_{m'}‖/‖f_m‖ para dos checkpoints consecutivos."""
        if self.stores_y:
            current = self.iterate(g)
            return float(np.linalg.norm(current - self.iterate(previous)) / np.linalg.norm(current))
        size = max(g.shape[0], previous.shape[0])
        current, padded = np.zeros(size, dtype=g.dtype), np.zeros(size, dtype=previous.dtype)
        current[:g.shape[0]] = g
        padded[:previous.shape[0]] = previous
        return float(np.linalg.norm(current - padded) / np.linalg.norm(g))

    def run(self, true_error: Optional[ErrorFn] = None) -> Termination:
        """
        Itera hasta convergencia, breakdown, estancamiento o max_iter.

        Los checkpoints caen cada k pasos, en max_iter y en el paso de
        breakdown. El primero no tiene estimador (NaN).
        """
        cfg = self.cfg
        counters = self.base.counters
        onset = self.settings.STAGNATION_ONSET * cfg.tol
        previous_g: Optional[np.ndarray] = None
        previous_est = math.nan
        onset_reached = False
        stalls = 0

        while True:
            self.process.extend(min(self.process.m + self.check_every, cfg.max_iter))
            g = self.coefficients()
            m = self.process.m
            est = math.nan if previous_g is None else self.estimate(g, previous_g)
            err = true_error(self.iterate(g, counted=False)) if true_error else None

            self.checkpoints.append(Checkpoint(
                m=m,
                mvms_cumulative=counters.mvms,
                est_rel_diff=est,
                true_rel_err=err,
            ))
            self.g = g
            logger.debug("checkpoint", m=m, est=est, true_err=err, mvms=counters.mvms)

            if self.process.breakdown:
                return Termination.BREAKDOWN
            if est <= cfg.tol:
                return Termination.CONVERGED

            if not math.isnan(est):
                if onset_reached and not math.isnan(previous_est):
                    if est > self.settings.STAGNATION_FACTOR * previous_est:
                        stalls += 1
                    else:
                        stalls = 0
                    if stalls >= self.settings.STAGNATION_WINDOW:
                        return Termination.STAGNATION
                onset_reached = onset_reached or est <= onset

            if m >= cfg.max_iter:
                return Termination.MAX_ITER
            previous_g, previous_est = g, est

    # ─── 4. iterado final ───────────────────────────────────────────────────
    def finalize(self) -> np.ndarray:
        return self.iterate(self.g, counted=True)


# ═══════════════════════════════════════════════════════════════════════════
# DRIVERS
# ═══════════════════════════════════════════════════════════════════════════

def _match_input_dtype(f: np.ndarray, A: LinearOperator, b: np.ndarray) -> np.ndarray:
    if A.is_real and not np.iscomplexobj(b) and np.iscomplexobj(f):
        return f.real.copy()
    return f


def _require_method(cfg: RunConfig, *allowed: Method) -> None:
    if Method(cfg.method) not in allowed:
        names = ", ".join(m.value for m in allowed)
        raise ValueError(f"este driver requiere method ∈ {{{names}}}, no {cfg.method}")


def _drive(
    A: LinearOperator,
    b: np.ndarray,
    q: Optional[PrecondPoly],
    cfg: RunConfig,
    function: FunctionKind,
    reference: Optional[np.ndarray] = None,
    raise_on_stagnation: bool = False
) -> Tuple[np.ndarray, ConvergenceReport]:
    """Esquema común: inicio → iteración → finalización, con desglose de mvms."""
    started = time.perf_counter()
    counters = A.counters
    entry = counters.mvms
    b = np.asarray(b)

    logger.info(
        f"Inicio {function.value}: {cfg.run_label} "
        f"(n={A.dim}, d={cfg.d}, tol={cfg.tol:.1e})"
    )

    certificate = certify_branch(q) if q is not None else None
    if function == FunctionKind.SQRT and q is not None and q.kind != PolyKind.CHEBYSHEV:
        nodes = np.asarray(q.nodes)
        if np.any(on_branch_cut(nodes, float(np.abs(nodes).max()))):
            raise BranchCutRitz("un nodo del precondicionador cae sobre (−∞, 0]")

    # ─── INICIO ────────────────────────────────────────────────────────────
    if function == FunctionKind.SQRT:
        base, rhs = A, A.apply(b)
    elif function == FunctionKind.SIGN:
        base, rhs = SquaredOperator(A), b
    else:
        base, rhs = A, b

    true_error: Optional[ErrorFn] = None
    if reference is not None:
        ref_norm = float(np.linalg.norm(reference)) or 1.0
        oracle_A = A.detached()

        def true_error(x: np.ndarray) -> float:
            if function == FunctionKind.SIGN:
                x = oracle_A.apply(x)
            return float(np.linalg.norm(x - reference) / ref_norm)

    if function == FunctionKind.SQRT and np.linalg.norm(rhs) == 0.0:
        # b en el núcleo de A: A^{1/2} b = 0
        logger.info("A·b = 0: el resultado es el vector nulo")
        report = ConvergenceReport(
            label=cfg.run_label,
            function=function,
            method=cfg.method,
            poly_kind=cfg.poly_kind,
            d=cfg.d,
            d_effective=q.d if q is not None else 1,
            checkpoints=[Checkpoint(m=0, mvms_cumulative=counters.mvms, est_rel_diff=0.0)],
            mvms=counters.mvms,
            inner_products=counters.inner_products,
            mvm_breakdown=MvmBreakdown(setup=entry, start=counters.mvms - entry),
            termination=Termination.CONVERGED,
            branch_certificate=certificate,
            seed=cfg.seed,
            wall_time=time.perf_counter() - started,
        )
        return np.zeros_like(rhs), report

    run = InvSqrtIteration(base, rhs, q, cfg)
    run.prepare()
    after_start = counters.mvms

    # ─── ITERACIÓN ─────────────────────────────────────────────────────────
    termination = run.run(true_error)
    after_iterations = counters.mvms

    # ─── FINALIZACIÓN ──────────────────────────────────────────────────────
    f = run.finalize()
    if function == FunctionKind.SIGN:
        f = A.apply(f)
    f = _match_input_dtype(f, A, b)
    end = counters.mvms
    run.checkpoints[-1].mvms_cumulative = end

    if termination == Termination.STAGNATION:
        logger.warning(
            f"Estancamiento en m={run.m}: estimador {run.checkpoints[-1].est_rel_diff:.3e} "
            f"(tol={cfg.tol:.1e})"
        )
        if raise_on_stagnation:
            raise Stagnation(f"{cfg.run_label}: estancado en m={run.m}")
    elif termination == Termination.MAX_ITER:
        logger.warning(f"{cfg.run_label}: max_iter={cfg.max_iter} alcanzado sin converger")

    iteration_mvms = after_iterations - after_start
    report = ConvergenceReport(
        label=cfg.run_label,
        function=function,
        method=cfg.method,
        poly_kind=cfg.poly_kind,
        d=cfg.d,
        d_effective=q.d if q is not None else 1,
        check_every=run.check_every,
        checkpoints=run.checkpoints,
        iterations=run.process.steps,
        mvms=end,
        inner_products=counters.inner_products,
        mvm_breakdown=MvmBreakdown(
            setup=entry,
            start=after_start - entry,
            iterations=iteration_mvms,
            finalization=end - after_iterations,
            per_iteration=max(1, iteration_mvms // max(run.process.steps, 1)),
        ),
        termination=termination,
        branch_certificate=certificate,
        orthogonalization=run.orthogonalization,
        seed=cfg.seed,
        wall_time=time.perf_counter() - started,
    )

    logger.info(
        f"Fin {cfg.run_label}: {report.termination} en m={report.iterations}, "
        f"mvms={report.mvms}, productos internos={report.inner_products}"
    )
    return f, report


def invsqrt_left_prec(
    A: LinearOperator,
    b: np.ndarray,
    q: PrecondPoly,
    cfg: RunConfig,
    reference: Optional[np.ndarray] = None,
    raise_on_stagnation: bool = False
) -> Tuple[np.ndarray, ConvergenceReport]:
    """
    A^{-1/2}b con Arnoldi sobre A·q(A)² precondicionado por izquierda.

    c = q(A)b; f_m = V_m·H_m^{-1/2}e_1‖c‖. El estimador usa sólo los
    coeficientes porque V_m es ortonormal.

    Args:
        A: operador (contadores de la corrida)
        b: vector no nulo
        q: polinomio ≈ z^{-1/2}
        cfg: method = left_prec
        reference: solución exacta para la columna de error real

    Returns:
        (f_m, ConvergenceReport)

    Example:
        >>> f, report = invsqrt_left_prec(op, b, chebyshev_invsqrt(a, bmax, 7), cfg)
        >>> report.termination
        'converged'
    """
    _require_method(cfg, Method.LEFT_PREC)
    return _drive(A, b, q, cfg, FunctionKind.INVSQRT, reference, raise_on_stagnation)


def invsqrt_right_prec(
    A: LinearOperator,
    b: np.ndarray,
    q: PrecondPoly,
    cfg: RunConfig,
    reference: Optional[np.ndarray] = None,
    raise_on_stagnation: bool = False
) -> Tuple[np.ndarray, ConvergenceReport]:
    """
    A^{-1/2}b precondicionado por derecha: f_m = Y_m·H_m^{-1/2}e_1‖b‖.

    Con cfg.store_y = False no se guarda Y_m y el iterado final es
    q(A)·V_m g_m (d − 1 mvms más).
    """
    _require_method(cfg, Method.RIGHT_PREC)
    return _drive(A, b, q, cfg, FunctionKind.INVSQRT, reference, raise_on_stagnation)


def invsqrt_plain(
    A: LinearOperator,
    b: np.ndarray,
    cfg: RunConfig,
    reference: Optional[np.ndarray] = None,
    raise_on_stagnation: bool = False
) -> Tuple[np.ndarray, ConvergenceReport]:
    """A^{-1/2}b sin precondicionar (Arnoldi, Lanczos o Lanczos de dos pasadas)."""
    _require_method(cfg, Method.PLAIN)
    return _drive(A, b, None, cfg, FunctionKind.INVSQRT, reference, raise_on_stagnation)


def sqrt_action(
    A: LinearOperator,
    b: np.ndarray,
    q: Optional[PrecondPoly],
    cfg: RunConfig,
    reference: Optional[np.ndarray] = None,
    raise_on_stagnation: bool = False
) -> Tuple[np.ndarray, ConvergenceReport]:
    """
    A^{1/2}b = A^{-1/2}(A·b) con el método de cfg.

    Para A singular con autovalor 0 semisimple, A·b no tiene componente en
    el núcleo y Arnoldi nunca ve ese autovalor.

    Raises:
        BranchCutRitz: si un nodo del precondicionador cae sobre (−∞, 0]
    """
    return _drive(A, b, q, cfg, FunctionKind.SQRT, reference, raise_on_stagnation)


def sign_action(
    A: LinearOperator,
    b: np.ndarray,
    q: Optional[PrecondPoly],
    cfg: RunConfig,
    reference: Optional[np.ndarray] = None,
    raise_on_stagnation: bool = False
) -> Tuple[np.ndarray, ConvergenceReport]:
    """
    sign(A)b = A·(A²)^{-1/2}b; A² se aplica como dos mvms y nunca se forma.

    q debe aproximar z^{-1/2} sobre el espectro de A².
    """
    return _drive(A, b, q, cfg, FunctionKind.SIGN, reference, raise_on_stagnation)


__all__ = [
    "InvSqrtIteration",
    "invsqrt_left_prec",
    "invsqrt_right_prec",
    "invsqrt_plain",
    "sqrt_action",
    "sign_action",
]
