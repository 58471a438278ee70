"""
Tests de aceptación: reproducción del ejemplo del laplaciano 2D, cota de
κ_pre, equivalencia con el oráculo denso, contadores, Lanczos de dos
pasadas, reducción de iteraciones, rama principal e involución de sign.

Son lentos (matrices densas de hasta 2500×2500); correr con
``pytest -m slow``.
"""

import numpy as np
import pytest

from src.funm.condition import condition_analysis
from src.funm.drivers import invsqrt_plain, sign_action, sqrt_action
from src.funm.reference import reference_solution
from src.funm.solver import compute_action
from src.linalg.dense import dense_sqrtm
from src.models.schemas import RunConfig
from src.operators.linear_operator import PlainOperator
from src.operators.model_problems import (
    laplace_spectral_interval,
    make_graph_laplacian,
    make_laplace,
    make_random_digraph,
    make_synthetic_nonhermitian,
)
from src.poly.chebyshev import chebyshev_invsqrt
from src.poly.newton import ritz_interp_poly


def rel_err(x: np.ndarray, ref: np.ndarray) -> float:
    return float(np.linalg.norm(x - ref) / np.linalg.norm(ref))


def unit_random(n: int, seed: int) -> np.ndarray:
    b = np.random.default_rng(seed).standard_normal(n)
    return b / np.linalg.norm(b)


def assert_counters_exact(report) -> None:
    """total = setup + inicio + iteraciones·(2d−1) + finalización"""
    mb = report.mvm_breakdown
    assert report.mvms == mb.setup + mb.start + mb.iterations + mb.finalization
    assert mb.iterations == report.iterations * mb.per_iteration
    if report.function == "sign":
        assert mb.per_iteration == 2 * (2 * report.d_effective - 1)
    else:
        assert mb.per_iteration == 2 * report.d_effective - 1


# ═══════════════════════════════════════════════════════════════════════════
# LAPLACIANO 2D, N = 50, CHEBYSHEV DE GRADO 31
# ═══════════════════════════════════════════════════════════════════════════

@pytest.mark.slow
def test_laplace2d_golden_condition_numbers():
    """Interpolación en 32 nodos: κ ≈ 1054, ε ≈ 0.1262, cota 1.7345, κ_pre real 1.5153"""
    A = make_laplace("laplace2d", 50)
    a, b = laplace_spectral_interval("laplace2d", 50)
    q = chebyshev_invsqrt(a, b, 31, fit="interpolation")

    est = condition_analysis(PlainOperator(A), q, dense_limit=2500)

    assert est.kappa == pytest.approx(1054.0, rel=0.01)
    assert est.epsilon == pytest.approx(0.12616, rel=0.01)
    assert est.kappa_pre_bound == pytest.approx(1.7345, rel=0.005)
    assert est.kappa_pre_actual == pytest.approx(1.5153, rel=0.01)


@pytest.mark.slow
def test_kappa_bound_never_violated():
    """50 SPD aleatorias × grados {7, 15, 31}: κ_pre real ≤ cota cuando ε < √2 − 1"""
    rng = np.random.default_rng(2024)
    n = 60
    applicable = 0

    for _ in range(50):
        kappa = float(np.exp(rng.uniform(np.log(100.0), np.log(2000.0))))
        lam = np.concatenate([[1.0, kappa], np.exp(rng.uniform(0.0, np.log(kappa), n - 2))])
        Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        A = (Q * lam) @ Q.T

        for degree in (7, 15, 31):
            est = condition_analysis(PlainOperator(A), chebyshev_invsqrt(1.0, kappa, degree))
            if not est.bound_applicable:
                continue
            applicable += 1
            assert est.kappa_pre_actual <= est.kappa_pre_bound * (1 + 1e-9)

    assert applicable >= 50


# ═══════════════════════════════════════════════════════════════════════════
# ORÁCULO Y CONTADORES
# ═══════════════════════════════════════════════════════════════════════════

ORACLE_CASES = [
    ("laplace", "plain", "none", 1),
    ("laplace", "left_prec", "chebyshev", 8),
    ("laplace", "right_prec", "chebyshev", 8),
    ("laplace", "left_prec", "ritz_newton", 6),
    ("laplace", "right_prec", "ritz_newton", 6),
    ("synthetic", "plain", "none", 1),
    ("synthetic", "left_prec", "ritz_newton", 6),
    ("synthetic", "right_prec", "ritz_newton", 6),
    ("synthetic", "left_prec", "contour_ls", 6),
    ("synthetic", "right_prec", "contour_ls", 6),
    ("laplace_small", "left_prec", "contour_ls", 6),
    ("laplace_small", "right_prec", "contour_ls", 6),
]


@pytest.mark.slow
@pytest.mark.parametrize("problem,method,poly_kind,d", ORACLE_CASES)
def test_invsqrt_matches_oracle(problem, method, poly_kind, d):
    """Error relativo ≤ 10·tol contra la solución densa; contadores exactos"""
    if problem == "laplace":
        A = make_laplace("laplace2d", 12)
        interval = laplace_spectral_interval("laplace2d", 12)
    elif problem == "laplace_small":
        A = make_laplace("laplace2d", 8)
        interval = None
    else:
        A = make_synthetic_nonhermitian(200, seed=3)
        interval = None
    b = unit_random(A.shape[0], seed=17)
    ref = reference_solution(A, b, "invsqrt")
    tol = 1e-10
    cfg = RunConfig(method=method, poly_kind=poly_kind, d=d, tol=tol, reorth=True, seed=0)

    f, report, _ = compute_action(PlainOperator(A), b, "invsqrt", cfg, interval=interval)

    assert report.converged
    assert rel_err(f, ref) <= 10 * tol
    assert_counters_exact(report)


@pytest.mark.slow
def test_two_pass_lanczos_consistency():
    """Dos pasadas = una pasada a 1e−12; la fase de iteración cuesta el doble"""
    A = make_laplace("laplace2d", 20)
    b = unit_random(A.shape[0], seed=5)
    one = RunConfig(method="plain", poly_kind="none", d=1, lanczos=True, tol=1e-10)
    two = RunConfig(method="plain", poly_kind="none", d=1, lanczos=True, two_pass=True, tol=1e-10)

    f1, r1 = invsqrt_plain(PlainOperator(A), b, one)
    f2, r2 = invsqrt_plain(PlainOperator(A), b, two)

    assert rel_err(f2, f1) <= 1e-12
    assert r2.mvm_breakdown.iterations + r2.mvm_breakdown.finalization == 2 * r1.mvm_breakdown.iterations
    assert_counters_exact(r2)


# ═══════════════════════════════════════════════════════════════════════════
# REDUCCIÓN DE ITERACIONES
# ═══════════════════════════════════════════════════════════════════════════

@pytest.mark.slow
def test_iterations_decrease_with_degree():
    """laplace3d N = 10, tol 1e−12: iteraciones estrictamente decrecientes en d"""
    A = make_laplace("laplace3d", 10)
    interval = laplace_spectral_interval("laplace3d", 10)
    b = unit_random(A.shape[0], seed=1)

    iterations = {}
    for d in (1, 2, 4, 8, 16):
        plain = d == 1
        cfg = RunConfig(
            method="plain" if plain else "left_prec",
            poly_kind="none" if plain else "chebyshev",
            d=d, tol=1e-12, check_every=1,
        )
        _, report, _ = compute_action(PlainOperator(A), b, "invsqrt", cfg, interval=interval)
        assert report.converged
        iterations[d] = report.iterations

    counts = [iterations[d] for d in (1, 2, 4, 8, 16)]
    assert all(x > y for x, y in zip(counts, counts[1:])), counts
    assert iterations[8] <= iterations[1] / 4


# ═══════════════════════════════════════════════════════════════════════════
# RAMA PRINCIPAL
# ═══════════════════════════════════════════════════════════════════════════

@pytest.mark.slow
def test_principal_branch_of_squared_polynomial():
    """Condición relativa 1/√2 en el espectro ⇒ sqrtm(q(A)²) = q(A)"""
    rng = np.random.default_rng(51)
    n = 20
    checked = 0

    for _ in range(20):
        half = rng.uniform(0.5, 3.0, n // 2) + 1j * rng.uniform(-2.0, 2.0, n // 2)
        lam = np.concatenate([half, half.conj()])
        X = np.eye(n) + 0.1 * rng.standard_normal((n, n))
        A = (X * lam) @ np.linalg.inv(X)

        nodes = lam * (1.0 + 1e-3 * (rng.standard_normal(n) + 1j * rng.standard_normal(n)))
        q = ritz_interp_poly(nodes)
        target = 1.0 / np.sqrt(lam)
        if not np.all(np.abs(q.evaluate(lam) - target) <= np.abs(target) / np.sqrt(2.0)):
            continue
        checked += 1

        op = PlainOperator(A.astype(complex))
        QA = np.column_stack([q.apply(op, e) for e in np.eye(n, dtype=complex)])
        root = dense_sqrtm(QA @ QA)
        assert np.linalg.norm(root - QA) <= 1e-9 * np.linalg.norm(QA)

    assert checked >= 10


# ═══════════════════════════════════════════════════════════════════════════
# SIGN Y SQRT SINGULAR
# ═══════════════════════════════════════════════════════════════════════════

@pytest.mark.slow
def test_sign_involution_nonhermitian():
    """diag(A₁, −A₂) con A_i sintéticas: sign(sign(M)b) = b"""
    A1 = make_synthetic_nonhermitian(80, seed=1).toarray()
    A2 = make_synthetic_nonhermitian(80, seed=2).toarray()
    M = np.block([[A1, np.zeros((80, 80))], [np.zeros((80, 80)), -A2]])
    b = unit_random(160, seed=4)
    cfg = RunConfig(method="plain", poly_kind="none", d=1, tol=1e-12, reorth=True, check_every=10)

    s, report = sign_action(PlainOperator(M), b, None, cfg)
    ss, _ = sign_action(PlainOperator(M), s, None, cfg)

    assert report.converged
    np.testing.assert_allclose(s[:80], b[:80], atol=1e-8)
    np.testing.assert_allclose(s[80:], -b[80:], atol=1e-8)
    assert rel_err(ss, b) <= 1e-8
    assert_counters_exact(report)


SINGULAR_CASES = [
    ("plain", "none", 1),
    ("left_prec", "ritz_newton", 4),
    ("right_prec", "ritz_newton", 4),
    ("left_prec", "contour_ls", 4),
    ("right_prec", "contour_ls", 4),
]


@pytest.mark.slow
@pytest.mark.parametrize("method,poly_kind,d", SINGULAR_CASES)
def test_sqrt_singular_graph_laplacian(method, poly_kind, d):
    """L = D_in − A singular: A^{1/2}b contra el oráculo y ortogonal a 1 (núcleo izquierdo)"""
    L = make_graph_laplacian(make_random_digraph(60, out_degree=3, seed=8))
    b = unit_random(60, seed=9)
    ref = reference_solution(L, b, "sqrt")
    cfg = RunConfig(method=method, poly_kind=poly_kind, d=d, tol=1e-10, reorth=True, seed=0)

    if d == 1:
        f, report = sqrt_action(PlainOperator(L), b, None, cfg)
    else:
        f, report, _ = compute_action(PlainOperator(L), b, "sqrt", cfg)

    assert report.converged
    assert report.iterations <= 60
    assert rel_err(f, ref) <= 1e-7
    ones = np.ones(60) / np.sqrt(60.0)
    assert abs(ones @ f) <= 1e-8 * np.linalg.norm(f)
    assert_counters_exact(report)


@pytest.mark.slow
def test_sign_ritz_newton_nonhermitian_matches_oracle():
    """sign con Ritz sobre A² (sintética n = 200, d = 16) contra el oráculo denso"""
    A = make_synthetic_nonhermitian(200, seed=7)
    b = unit_random(200, seed=3)
    ref = reference_solution(A, b, "sign")
    cfg = RunConfig(method="left_prec", poly_kind="ritz_newton", d=16, tol=1e-12, reorth=True)

    f, report, _ = compute_action(PlainOperator(A), b, "sign", cfg)

    assert report.converged
    assert rel_err(f, ref) <= 1e-8
    assert report.mvm_breakdown.setup == 2 * 16
    assert_counters_exact(report)
