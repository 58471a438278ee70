"""
Tests unitarios de Arnoldi, Lanczos y valores de Ritz.
"""

import numpy as np
import pytest

from src.krylov.arnoldi import ArnoldiProcess, arnoldi
from src.krylov.lanczos import lanczos, two_pass_lanczos_combine
from src.krylov.ritz import RitzKind, ritz_values
from src.operators.linear_operator import PlainOperator
from src.operators.model_problems import (
    make_graph_laplacian,
    make_laplace,
    make_random_digraph,
    make_synthetic_nonhermitian,
)
from src.utils.errors import ZeroStartVector


@pytest.fixture
def rng():
    return np.random.default_rng(11)


@pytest.fixture
def nonsymmetric():
    return make_synthetic_nonhermitian(40, seed=4).toarray()


# ═══════════════════════════════════════════════════════════════════════════
# ARNOLDI
# ═══════════════════════════════════════════════════════════════════════════

@pytest.mark.unit
def test_arnoldi_relation(nonsymmetric, rng):
    """A V = V H + h_{m+1,m} v_{m+1} e_m*"""
    A = nonsymmetric
    dec = arnoldi(PlainOperator(A), rng.standard_normal(40), 10)

    e_m = np.zeros(10)
    e_m[-1] = 1.0
    residual = A @ dec.V - dec.V @ dec.H - dec.h_next * np.outer(dec.v_next, e_m)
    assert np.linalg.norm(residual) <= 1e-12 * np.linalg.norm(A)
    assert np.allclose(np.tril(dec.H, -2), 0.0)
    assert dec.H_extended.shape == (11, 10)


@pytest.mark.unit
def test_arnoldi_orthonormal_basis(nonsymmetric, rng):
    dec = arnoldi(PlainOperator(nonsymmetric), rng.standard_normal(40), 15, reorth=True)
    np.testing.assert_allclose(dec.V.T @ dec.V, np.eye(15), atol=1e-13)


@pytest.mark.unit
def test_arnoldi_counters(nonsymmetric, rng):
    """m mvms; (j+1) productos internos por pasada de MGS en el paso j"""
    b = rng.standard_normal(40)

    op = PlainOperator(nonsymmetric)
    process = ArnoldiProcess(op, b)
    process.extend(10)
    assert op.counters.mvms == 10
    assert len(process.sweeps) == 10
    assert set(process.sweeps) <= {1, 2}
    expected = sum((j + 1) * s for j, s in enumerate(process.sweeps))
    assert op.counters.inner_products == expected
    assert 55 <= expected <= 110

    op2 = PlainOperator(nonsymmetric)
    arnoldi(op2, b, 10, reorth=True)
    assert op2.counters.mvms == 10
    assert op2.counters.inner_products == 110


@pytest.mark.unit
def test_arnoldi_second_sweep_keeps_orthogonality(rng):
    """Sin reorth, la segunda pasada condicional mantiene V ortonormal en A SPD"""
    A = make_laplace("laplace2d", 12)
    process = ArnoldiProcess(PlainOperator(A), rng.standard_normal(144))
    process.extend(60)
    V = np.column_stack(process.vectors)

    assert 2 in process.sweeps
    np.testing.assert_allclose(V.T @ V, np.eye(V.shape[1]), atol=1e-10)


@pytest.mark.unit
def test_arnoldi_stops_at_dimension():
    """Nunca más de n pasos: en m = n el proceso termina con breakdown"""
    A = make_synthetic_nonhermitian(6, seed=2).toarray()
    op = PlainOperator(A)
    dec = arnoldi(op, np.arange(1.0, 7.0), 20, reorth=True)

    assert dec.breakdown
    assert dec.m == 6
    assert op.counters.mvms == 6


@pytest.mark.unit
def test_arnoldi_singular_range_start_terminates():
    """Inicio en el rango de un laplaciano singular: breakdown sin exceder n"""
    L = make_graph_laplacian(make_random_digraph(60, out_degree=3, seed=8))
    start = L @ np.random.default_rng(9).standard_normal(60)
    process = ArnoldiProcess(PlainOperator(L), start, reorth=True)
    process.extend(200)
    V = np.column_stack(process.vectors)

    assert process.breakdown
    assert process.m <= 60
    np.testing.assert_allclose(V.T @ V, np.eye(process.m), atol=1e-10)


@pytest.mark.unit
def test_arnoldi_deflation_point_and_truncate():
    """Subdiagonal despreciable no detectado como breakdown → truncar ahí"""
    A = np.diag([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
    b = np.array([1.0, 1.0, 1.0, 1e-12, 1e-12, 1e-12])
    process = ArnoldiProcess(PlainOperator(A), b, reorth=True, breakdown_tol=1e-300)
    process.extend(3)
    assert not process.breakdown
    assert process.deflation_point() is None

    process.extend(6)
    assert process.deflation_point() == 3

    process.truncate(3)
    dec = process.decomposition()
    assert process.breakdown
    assert dec.m == 3
    assert dec.h_next == 0.0
    assert process.steps == 6
    np.testing.assert_allclose(np.sort(np.linalg.eigvals(dec.H).real), [1.0, 2.0, 3.0], atol=1e-8)

    with pytest.raises(ValueError):
        process.truncate(5)


@pytest.mark.unit
def test_arnoldi_lucky_breakdown():
    """Krylov invariante de dimensión 2 → breakdown en m = 2"""
    A = np.diag([1.0, 2.0, 3.0])
    dec = arnoldi(PlainOperator(A), np.array([1.0, 1.0, 0.0]), 3)

    assert dec.breakdown
    assert dec.m == 2
    assert dec.h_next == 0.0
    np.testing.assert_allclose(np.sort(np.linalg.eigvals(dec.H).real), [1.0, 2.0], atol=1e-13)


@pytest.mark.unit
def test_arnoldi_zero_start():
    with pytest.raises(ZeroStartVector):
        arnoldi(PlainOperator(np.eye(3)), np.zeros(3), 2)


@pytest.mark.unit
def test_arnoldi_process_is_incremental(nonsymmetric, rng):
    """Extender en dos tramos da la misma H que en uno"""
    b = rng.standard_normal(40)
    process = ArnoldiProcess(PlainOperator(nonsymmetric), b)
    process.extend(4)
    process.extend(9)

    np.testing.assert_allclose(
        process.hessenberg(), arnoldi(PlainOperator(nonsymmetric), b, 9).H, atol=1e-14
    )
    assert len(process.vectors) == 9


# ═══════════════════════════════════════════════════════════════════════════
# LANCZOS
# ═══════════════════════════════════════════════════════════════════════════

@pytest.mark.unit
def test_lanczos_matches_arnoldi(rng):
    """Para A simétrica, T_m = H_m de Arnoldi"""
    A = make_laplace("laplace1d", 50)
    b = rng.standard_normal(50)

    tri = lanczos(PlainOperator(A), b, 10)
    dec = arnoldi(PlainOperator(A), b, 10, reorth=True)
    np.testing.assert_allclose(tri.H, dec.H, atol=1e-10)
    np.testing.assert_allclose(np.abs(tri.V), np.abs(dec.V), atol=1e-10)


@pytest.mark.unit
def test_lanczos_inner_products(rng):
    """Dos productos internos por paso"""
    op = PlainOperator(make_laplace("laplace1d", 50))
    lanczos(op, rng.standard_normal(50), 12)
    assert op.counters.mvms == 12
    assert op.counters.inner_products == 24


@pytest.mark.unit
def test_two_pass_combine_matches_stored_basis(rng):
    """La segunda pasada regenera la misma base: Σ c_j v_j = V c"""
    A = make_laplace("laplace1d", 50)
    b = rng.standard_normal(50)
    coeffs = rng.standard_normal(12)

    tri = lanczos(PlainOperator(A), b, 12)
    op = PlainOperator(A)
    combined = two_pass_lanczos_combine(op, b, 12, coeffs)

    np.testing.assert_allclose(combined, tri.V @ coeffs, rtol=1e-12, atol=1e-13)
    assert op.counters.mvms == 12


@pytest.mark.unit
def test_two_pass_combine_length_check(rng):
    with pytest.raises(ValueError):
        two_pass_lanczos_combine(PlainOperator(np.eye(4)), np.ones(4), 3, np.ones(2))


# ═══════════════════════════════════════════════════════════════════════════
# RITZ
# ═══════════════════════════════════════════════════════════════════════════

@pytest.mark.unit
def test_ritz_values_full_krylov_are_eigenvalues():
    """Con breakdown los valores de Ritz (estándar y armónicos) son autovalores"""
    A = np.diag([1.0, 2.0, 3.0, 4.0])
    dec = arnoldi(PlainOperator(A), np.ones(4), 4)

    for kind in (RitzKind.STANDARD, RitzKind.HARMONIC):
        ritz = ritz_values(dec, kind)
        assert len(ritz) == 4
        np.testing.assert_allclose(np.sort(ritz.values), [1.0, 2.0, 3.0, 4.0], atol=1e-12)


@pytest.mark.unit
def test_harmonic_ritz_inside_spectrum(rng):
    """Para A hermitiana definida positiva los armónicos caen en [λ_min, λ_max]"""
    A = make_laplace("laplace1d", 50)
    lam = np.linalg.eigvalsh(A.toarray())
    dec = arnoldi(PlainOperator(A), rng.standard_normal(50), 6, reorth=True)

    harmonic = ritz_values(dec, "harmonic")
    assert not np.iscomplexobj(harmonic.values)
    assert np.all(harmonic.values >= lam[0] - 1e-10)
    assert np.all(harmonic.values <= lam[-1] + 1e-10)


@pytest.mark.unit
def test_ritz_values_real_matrix_conjugate_closed(nonsymmetric, rng):
    """A real: los valores de Ritz complejos vienen en pares conjugados"""
    dec = arnoldi(PlainOperator(nonsymmetric), rng.standard_normal(40), 8)
    values = np.asarray(ritz_values(dec).values, dtype=complex)
    gaps = np.abs(values.conj()[:, None] - values[None, :]).min(axis=1)
    assert np.all(gaps <= 1e-10 * np.abs(values).max())
