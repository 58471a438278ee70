"""
Tests unitarios de los polinomios precondicionadores (Chebyshev, Newton,
contorno), el certificado de rama y la serialización.
"""

import numpy as np
import pytest

from src.models.schemas import RunConfig
from src.operators.linear_operator import PlainOperator, SquaredOperator
from src.operators.model_problems import (
    laplace_spectral_interval,
    make_laplace,
    make_synthetic_nonhermitian,
)
from src.poly.branch import certify_branch
from src.poly.chebyshev import chebyshev_invsqrt, clenshaw_apply
from src.poly.contour_ls import build_contour, contour_ls_poly, hull_sample
from src.poly.factory import build_polynomial, estimate_spectral_interval
from src.poly.newton import NewtonPoly, divided_differences, leja_order, ritz_interp_poly
from src.poly.serialization import dumps_polynomial, load_polynomial, loads_polynomial, save_polynomial
from src.utils.errors import (
    BranchCutNode,
    BranchCutRitz,
    ConfigError,
    DegenerateContour,
    DimensionMismatch,
    InvalidInterval,
    NearCoincidentNodes,
    NodeOnBranchCut,
    PolynomialFormatError,
)


@pytest.fixture
def rng():
    return np.random.default_rng(3)


def diagonal_operator(values):
    return PlainOperator(np.diag(values))


# ═══════════════════════════════════════════════════════════════════════════
# CHEBYSHEV
# ═══════════════════════════════════════════════════════════════════════════

@pytest.mark.unit
def test_chebyshev_approximates_invsqrt():
    """Grado 31 en [1, 100]: |1 − √z q(z)| pequeño en todo el intervalo"""
    q = chebyshev_invsqrt(1.0, 100.0, 31)
    z = np.linspace(1.0, 100.0, 2000)
    assert q.degree == 31
    assert np.max(np.abs(1.0 - np.sqrt(z) * q.evaluate(z))) < 1e-2


@pytest.mark.unit
def test_chebyshev_interpolation_fit_matches_nodes():
    """fit = interpolation: q(z_k) = z_k^{-1/2} en los k+1 nodos de Chebyshev–Gauss"""
    a, b, degree = 1.0, 100.0, 9
    q = chebyshev_invsqrt(a, b, degree, fit="interpolation")
    k = np.arange(degree + 1)
    z = 0.5 * (a + b) + 0.5 * (b - a) * np.cos((2 * k + 1) * np.pi / (2 * (degree + 1)))

    assert q.degree == degree
    np.testing.assert_allclose(q.evaluate(z), 1.0 / np.sqrt(z), rtol=1e-12)

    series = chebyshev_invsqrt(a, b, degree)
    assert not np.allclose(series.coeffs, q.coeffs)


@pytest.mark.unit
def test_chebyshev_invalid_interval():
    with pytest.raises(InvalidInterval):
        chebyshev_invsqrt(0.0, 1.0, 3)
    with pytest.raises(InvalidInterval):
        chebyshev_invsqrt(2.0, 1.0, 3)


@pytest.mark.unit
def test_clenshaw_matches_evaluate(rng):
    """q(D)v = q(diag)·v con exactamente ``degree`` mvms"""
    q = chebyshev_invsqrt(1.0, 100.0, 15)
    lam = np.linspace(1.0, 100.0, 30)
    op = diagonal_operator(lam)
    v = rng.standard_normal(30)

    result = clenshaw_apply(q, op, v)
    np.testing.assert_allclose(result, q.evaluate(lam) * v, rtol=1e-11, atol=1e-13)
    assert op.counters.mvms == 15


@pytest.mark.unit
def test_clenshaw_degree_zero(rng):
    """Grado 0: c_0·v sin mvms"""
    q = chebyshev_invsqrt(1.0, 4.0, 0)
    op = diagonal_operator(np.ones(5))
    v = rng.standard_normal(5)
    np.testing.assert_allclose(q.apply(op, v), q.coeffs[0] * v)
    assert op.counters.mvms == 0

    with pytest.raises(DimensionMismatch):
        q.apply(op, np.ones(4))


# ═══════════════════════════════════════════════════════════════════════════
# NEWTON
# ═══════════════════════════════════════════════════════════════════════════

@pytest.mark.unit
def test_leja_order_starts_at_largest():
    """Primero el de mayor módulo, luego el más lejano"""
    order = leja_order(np.array([2.0, 1.0, 4.0, 3.0]))
    assert order[0] == 4.0
    assert order[1] == 1.0
    assert sorted(order.tolist()) == [1.0, 2.0, 3.0, 4.0]


@pytest.mark.unit
def test_divided_differences_quadratic():
    """x² en 0, 1, 2 → f[x0] = 0, f[x0,x1] = 1, f[x0,x1,x2] = 1"""
    nodes = np.array([0.0, 1.0, 2.0])
    np.testing.assert_allclose(divided_differences(nodes, nodes ** 2), [0.0, 1.0, 1.0])


@pytest.mark.unit
def test_ritz_interp_poly_interpolates(rng):
    """q(θ) = θ^{-1/2} en los nodos; q(D)v exacto si D tiene los nodos como espectro"""
    nodes = np.array([1.0, 2.0, 4.0, 8.0])
    q = ritz_interp_poly(nodes)
    np.testing.assert_allclose(q.evaluate(nodes), nodes ** -0.5, rtol=1e-13)

    op = diagonal_operator(nodes)
    v = rng.standard_normal(4)
    np.testing.assert_allclose(q.apply(op, v), v / np.sqrt(nodes), rtol=1e-12)
    assert op.counters.mvms == 3


@pytest.mark.unit
def test_ritz_interp_poly_conjugate_nodes_real_result(rng):
    """Nodos conjugados: q real, q(A)v real para A y v reales"""
    q = ritz_interp_poly(np.array([2.0 + 1.0j, 2.0 - 1.0j, 5.0]))
    assert q.is_real

    A = make_laplace("laplace1d", 10)
    result = q.apply(PlainOperator(A), rng.standard_normal(10))
    assert not np.iscomplexobj(result)


@pytest.mark.unit
def test_ritz_interp_poly_errors():
    with pytest.raises(BranchCutNode):
        ritz_interp_poly(np.array([-1.0, 2.0]))
    with pytest.raises(BranchCutNode):
        ritz_interp_poly(np.array([0.0, 2.0]))
    with pytest.raises(NearCoincidentNodes):
        ritz_interp_poly(np.array([1.0, 1.0 + 1e-14, 3.0]))


@pytest.mark.unit
def test_newton_certification_sample_covers_hull():
    """El certificado de Newton muestrea el borde de la envolvente, no sólo los nodos"""
    q = ritz_interp_poly(np.array([1.0, 2.0, 4.0]))
    sample = q.certification_sample(200)

    assert not np.iscomplexobj(sample)
    assert sample.shape[0] == 203
    assert sample.min() == pytest.approx(1.0)
    assert sample.max() == pytest.approx(4.0)
    off_nodes = sample[np.abs(sample[:, None] - np.array([1.0, 2.0, 4.0])).min(axis=1) > 1e-3]
    assert off_nodes.shape[0] >= 150


@pytest.mark.unit
def test_hull_sample_complex_boundary():
    """Valores complejos: puntos sobre los lados del triángulo"""
    values = np.array([1.0 + 1.0j, 1.0 - 1.0j, 3.0])
    sample = hull_sample(values, 90)

    assert sample.shape[0] == 93
    sides = [(1.0 + 1.0j, 1.0 - 1.0j), (1.0 - 1.0j, 3.0), (3.0, 1.0 + 1.0j)]
    # distancia de cada punto del borde a su lado más cercano (desigualdad triangular)
    slack = np.array([
        min(abs(z - p) + abs(z - r) - abs(p - r) for p, r in sides) for z in sample[3:]
    ])
    assert np.all(slack <= 1e-12)


@pytest.mark.unit
def test_newton_certificate_fails_between_nodes():
    """q interpola 1/√z sólo en nodos muy separados: el borde revela la falla"""
    nodes = np.array([1.0, 1000.0])
    q = ritz_interp_poly(nodes)
    assert np.all(np.real(q.evaluate(nodes)) > 0)

    cert = certify_branch(q, sample=q.certification_sample(1000))
    assert not cert.relative_condition_holds


# ═══════════════════════════════════════════════════════════════════════════
# CONTORNO
# ═══════════════════════════════════════════════════════════════════════════

@pytest.mark.unit
def test_build_contour_conjugate_symmetric():
    """Valores cerrados bajo conjugación → nodos cerrados bajo conjugación"""
    nodes = build_contour(np.array([1.0 + 1.0j, 1.0 - 1.0j, 3.0]), min_abs=0.1, step=0.01)

    assert nodes[0] == pytest.approx(3.0)
    gaps = np.abs(nodes.conj()[:, None] - nodes[None, :]).min(axis=1)
    assert np.all(gaps <= 1e-10 * np.abs(nodes).max())
    assert np.all(np.abs(nodes) >= 0.1 * (1 - 1e-12))


@pytest.mark.unit
def test_build_contour_projects_onto_min_abs():
    """Los puntos cercanos al origen quedan sobre |z| = min_abs"""
    nodes = build_contour(np.array([0.01, 2.0]), min_abs=0.2, step=0.01)
    assert np.abs(nodes).min() == pytest.approx(0.2, rel=1e-6)
    assert np.all(nodes.real > 0)


@pytest.mark.unit
def test_build_contour_errors():
    with pytest.raises(DegenerateContour):
        build_contour(np.array([2.0, 2.0]), min_abs=0.1, step=0.01)
    with pytest.raises(NodeOnBranchCut):
        build_contour(np.array([-1.0 + 1.0j, -1.0 - 1.0j, 2.0]), min_abs=0.1, step=0.01)


@pytest.mark.unit
def test_contour_ls_poly_apply_matches_evaluate(rng):
    """q(D)v = q(diag)·v, ``degree`` mvms y coeficientes reales para nodos reales"""
    q = contour_ls_poly(np.array([0.5, 1.0, 2.0, 4.0]), min_abs=0.1, step=0.01)
    assert q.degree == 3
    assert q.is_real
    assert q.H_small.shape == (5, 4)

    lam = np.linspace(0.5, 4.0, 20)
    op = diagonal_operator(lam)
    v = rng.standard_normal(20)
    result = q.apply(op, v)

    assert not np.iscomplexobj(result)
    np.testing.assert_allclose(result, np.real(q.evaluate(lam)) * v, rtol=1e-10, atol=1e-12)
    assert op.counters.mvms == 3
    assert certify_branch(q).satisfied


# ═══════════════════════════════════════════════════════════════════════════
# CERTIFICADO DE RAMA
# ═══════════════════════════════════════════════════════════════════════════

@pytest.mark.unit
def test_certify_branch_chebyshev():
    cert = certify_branch(chebyshev_invsqrt(1.0, 100.0, 15))
    assert cert.satisfied
    assert cert.relative_condition_holds
    assert cert.n_points == 1000
    assert cert.min_real_part > 0


@pytest.mark.unit
def test_certify_branch_failure():
    """q ≡ −1: falla el certificado; en modo estricto BranchCutRitz"""
    q = NewtonPoly(nodes=np.array([1.0]), divided_diffs=np.array([-1.0]))
    cert = certify_branch(q, sample=np.linspace(1.0, 2.0, 5))
    assert not cert.satisfied
    assert not cert.relative_condition_holds

    with pytest.raises(BranchCutRitz):
        certify_branch(q, sample=np.linspace(1.0, 2.0, 5), strict=True)


# ═══════════════════════════════════════════════════════════════════════════
# CONSTRUCCIÓN
# ═══════════════════════════════════════════════════════════════════════════

@pytest.mark.unit
def test_build_polynomial_chebyshev_uses_interval():
    """Con intervalo conocido no hay mvms de setup"""
    A = make_laplace("laplace1d", 30)
    op = PlainOperator(A)
    cfg = RunConfig(method="left_prec", poly_kind="chebyshev", d=8)

    setup = build_polynomial(op, np.ones(30), cfg, interval=laplace_spectral_interval("laplace1d", 30))
    assert setup.poly.degree == 7
    assert setup.d_effective == 8
    assert op.counters.mvms == 0


@pytest.mark.unit
def test_build_polynomial_ritz_newton_setup_cost(rng):
    """d pasos de Arnoldi para los valores de Ritz"""
    op = PlainOperator(make_laplace("laplace1d", 30))
    cfg = RunConfig(method="right_prec", poly_kind="ritz_newton", d=6)

    setup = build_polynomial(op, rng.standard_normal(30), cfg)
    assert op.counters.mvms == 6
    assert setup.poly.degree == 5
    assert len(setup.ritz) == 6


@pytest.mark.unit
def test_build_polynomial_degree_reduced_on_breakdown():
    """Arnoldi de Ritz con breakdown: grado = valores de Ritz disponibles − 1"""
    op = PlainOperator(np.diag([1.0, 2.0, 3.0]))
    cfg = RunConfig(method="left_prec", poly_kind="ritz_newton", d=8)

    setup = build_polynomial(op, np.ones(3), cfg)
    assert setup.poly.degree == 2
    assert setup.d_effective == 3


@pytest.mark.unit
def test_build_polynomial_squared_operator_for_sign(rng):
    """Para sign los valores de Ritz son de A² (positivos aunque A sea indefinida)"""
    A = np.diag(np.concatenate([-np.linspace(1.0, 3.0, 10), np.linspace(1.0, 3.0, 10)]))
    op = PlainOperator(A)
    cfg = RunConfig(method="left_prec", poly_kind="ritz_newton", d=4)

    setup = build_polynomial(SquaredOperator(op), rng.standard_normal(20), cfg)
    assert np.all(np.real(setup.ritz.values) > 0)
    assert op.counters.mvms == 8


@pytest.mark.unit
def test_build_polynomial_contour_harvest_independent_of_d(rng):
    """Contorno: CONTOUR_RITZ_STEPS pasos de Arnoldi (acotado por n), grado d − 1"""
    op = PlainOperator(make_laplace("laplace1d", 100))
    cfg = RunConfig(method="left_prec", poly_kind="contour_ls", d=6)

    setup = build_polynomial(op, rng.standard_normal(100), cfg)
    assert op.counters.mvms == 60
    assert len(setup.ritz) == 60
    assert setup.poly.degree == 5

    small = PlainOperator(make_laplace("laplace1d", 30))
    build_polynomial(small, rng.standard_normal(30), cfg)
    assert small.counters.mvms == 30

    custom = PlainOperator(make_laplace("laplace1d", 100))
    cfg20 = RunConfig(method="left_prec", poly_kind="contour_ls", d=6, contour_ritz_steps=20)
    assert build_polynomial(custom, rng.standard_normal(100), cfg20).poly.degree == 5
    assert custom.counters.mvms == 20


@pytest.mark.unit
def test_estimate_spectral_interval_rejects_nonhermitian(rng):
    """Lanczos no se corre sobre un operador no hermitiano"""
    op = PlainOperator(make_synthetic_nonhermitian(50, seed=7))
    with pytest.raises(ConfigError):
        estimate_spectral_interval(op, rng.standard_normal(50))
    assert op.counters.mvms == 0


@pytest.mark.unit
def test_estimate_spectral_interval_encloses_spectrum(rng):
    A = make_laplace("laplace1d", 40)
    a, b = estimate_spectral_interval(PlainOperator(A), rng.standard_normal(40))
    lam = np.linalg.eigvalsh(A.toarray())
    assert 0 < a <= lam[0] * 1.01
    assert b >= lam[-1]


# ═══════════════════════════════════════════════════════════════════════════
# SERIALIZACIÓN
# ═══════════════════════════════════════════════════════════════════════════

@pytest.mark.unit
@pytest.mark.parametrize("build", [
    lambda: chebyshev_invsqrt(0.5, 8.0, 9),
    lambda: ritz_interp_poly(np.array([1.0 + 0.5j, 1.0 - 0.5j, 3.0, 6.0])),
    lambda: contour_ls_poly(np.array([1.0 + 0.5j, 1.0 - 0.5j, 3.0]), min_abs=0.1, step=0.02),
], ids=["chebyshev", "ritz_newton", "contour_ls"])
def test_serialization_preserves_polynomial(build, tmp_path):
    """17 dígitos: el polinomio leído evalúa igual que el original"""
    q = build()
    path = save_polynomial(q, tmp_path / "q.poly")
    loaded = load_polynomial(path)

    z = np.linspace(0.5, 8.0, 50) + 0.1j
    assert loaded.kind == q.kind
    assert loaded.degree == q.degree
    np.testing.assert_allclose(loaded.evaluate(z), q.evaluate(z), rtol=1e-14)


@pytest.mark.unit
def test_serialization_errors():
    """Cabecera ausente, tipo desconocido, archivo truncado"""
    with pytest.raises(PolynomialFormatError):
        loads_polynomial("kind chebyshev\n")

    with pytest.raises(PolynomialFormatError):
        loads_polynomial("# polyprec polynomial v1\nkind taylor\ndegree 1\n")

    text = dumps_polynomial(chebyshev_invsqrt(1.0, 4.0, 3))
    truncated = "\n".join(text.splitlines()[:-2]) + "\n"
    with pytest.raises(PolynomialFormatError):
        loads_polynomial(truncated)


@pytest.mark.unit
def test_serialization_bad_number_reports_line():
    text = dumps_polynomial(chebyshev_invsqrt(1.0, 4.0, 2)).replace("interval 1", "interval x")
    with pytest.raises(PolynomialFormatError) as excinfo:
        loads_polynomial(text)
    assert excinfo.value.line == 4
