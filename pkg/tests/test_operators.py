"""
Tests unitarios de operadores, problemas modelo y Matrix Market.
"""

from pathlib import Path

import numpy as np
import pytest
import scipy.sparse as sp

from src.operators.linear_operator import (
    PlainOperator,
    PreconditionedOperator,
    ShiftedOperator,
    SquaredOperator,
    as_csr,
    check_csr_invariants,
)
from src.operators.matrix_market import read_matrix_market, write_matrix_market
from src.operators.model_problems import (
    laplace_spectral_interval,
    make_graph_laplacian,
    make_laplace,
    make_model_problem,
    make_random_digraph,
    make_rhs,
    make_synthetic_nonhermitian,
)
from src.poly.chebyshev import chebyshev_invsqrt
from src.utils.errors import DimensionMismatch, IoError, ParseError, UnsupportedField


@pytest.fixture
def laplace1d():
    return make_laplace("laplace1d", 20)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


# ═══════════════════════════════════════════════════════════════════════════
# CSR
# ═══════════════════════════════════════════════════════════════════════════

@pytest.mark.unit
def test_as_csr_canonical():
    """Duplicados sumados e índices ordenados"""
    A = sp.coo_matrix(([1.0, 2.0, 3.0], ([0, 0, 1], [1, 1, 0])), shape=(2, 2))
    csr = as_csr(A)
    assert check_csr_invariants(csr)
    assert csr[0, 1] == 3.0


@pytest.mark.unit
def test_as_csr_rejects_rectangular():
    with pytest.raises(ValueError):
        as_csr(np.ones((2, 3)))


# ═══════════════════════════════════════════════════════════════════════════
# OPERADORES
# ═══════════════════════════════════════════════════════════════════════════

@pytest.mark.unit
def test_plain_operator_counts_mvms(laplace1d, rng):
    """Una mvm por vector, una por columna en bloques"""
    op = PlainOperator(laplace1d)
    x = rng.standard_normal(20)

    np.testing.assert_allclose(op.apply(x), laplace1d @ x)
    assert op.counters.mvms == 1

    op.apply(rng.standard_normal((20, 3)))
    assert op.counters.mvms == 4


@pytest.mark.unit
def test_plain_operator_dimension_mismatch(laplace1d):
    op = PlainOperator(laplace1d)
    with pytest.raises(DimensionMismatch):
        op.apply(np.ones(19))


@pytest.mark.unit
def test_squared_operator_two_mvms(laplace1d, rng):
    """A² sin formar A²: dos mvms por aplicación"""
    op = PlainOperator(laplace1d)
    sq = SquaredOperator(op)
    x = rng.standard_normal(20)

    np.testing.assert_allclose(sq.apply(x), laplace1d @ (laplace1d @ x))
    assert op.counters.mvms == 2


@pytest.mark.unit
def test_shifted_operator(laplace1d, rng):
    op = PlainOperator(laplace1d)
    x = rng.standard_normal(20)
    shifted = ShiftedOperator(op, 0.5)
    np.testing.assert_allclose(shifted.apply(x), laplace1d @ x - 0.5 * x)
    assert not op.shifted(1j).is_real


@pytest.mark.unit
def test_is_hermitian_detection(laplace1d):
    """Laplaciano hermitiano (disperso y denso); sintética y grafo no"""
    assert PlainOperator(laplace1d).is_hermitian
    assert PlainOperator(laplace1d.toarray()).is_hermitian
    assert not PlainOperator(make_synthetic_nonhermitian(30, seed=1)).is_hermitian
    graph = make_graph_laplacian(make_random_digraph(20, out_degree=2, seed=3))
    assert not PlainOperator(graph).is_hermitian

    skew = 1j * np.array([[0.0, 1.0], [-1.0, 0.0]])
    assert PlainOperator(skew).is_hermitian


@pytest.mark.unit
def test_is_hermitian_composed_operators(laplace1d):
    """A² y A − σI heredan la hermiticidad de A (σ real)"""
    sym = PlainOperator(laplace1d)
    nonsym = PlainOperator(make_synthetic_nonhermitian(30, seed=1))

    assert SquaredOperator(sym).is_hermitian
    assert not SquaredOperator(nonsym).is_hermitian
    assert ShiftedOperator(sym, 0.5).is_hermitian
    assert not ShiftedOperator(sym, 0.5 + 1.0j).is_hermitian


@pytest.mark.unit
def test_preconditioned_operator_mvm_count(laplace1d, rng):
    """A·q(A)² con q de grado d − 1 → 2d − 1 mvms"""
    a, b = laplace_spectral_interval("laplace1d", 20)
    q = chebyshev_invsqrt(a, b, 3)
    op = PlainOperator(laplace1d)
    prec = PreconditionedOperator(op, q, "left")

    prec.apply(rng.standard_normal(20))
    assert prec.applications_per_call == 7
    assert op.counters.mvms == 7


@pytest.mark.unit
def test_left_and_right_orders_agree(laplace1d, rng):
    """A y q(A) conmutan: los dos órdenes dan el mismo vector"""
    a, b = laplace_spectral_interval("laplace1d", 20)
    q = chebyshev_invsqrt(a, b, 4)
    x = rng.standard_normal(20)

    left = PreconditionedOperator(PlainOperator(laplace1d), q, "left").apply(x)
    right = PreconditionedOperator(PlainOperator(laplace1d), q, "right").apply(x)
    np.testing.assert_allclose(left, right, rtol=1e-12, atol=1e-12)


@pytest.mark.unit
def test_right_order_keeps_intermediates(laplace1d, rng):
    """Con keep_intermediates se guarda q(A)x de cada aplicación"""
    a, b = laplace_spectral_interval("laplace1d", 20)
    q = chebyshev_invsqrt(a, b, 2)
    prec = PreconditionedOperator(PlainOperator(laplace1d), q, "right", keep_intermediates=True)
    x1, x2 = rng.standard_normal(20), rng.standard_normal(20)

    prec.apply(x1)
    prec.apply(x2)

    assert len(prec.intermediates) == 2
    np.testing.assert_allclose(
        prec.intermediates[1], q.apply(PlainOperator(laplace1d), x2), rtol=1e-13
    )


@pytest.mark.unit
def test_keep_intermediates_requires_right(laplace1d):
    q = chebyshev_invsqrt(0.1, 4.0, 2)
    with pytest.raises(ValueError):
        PreconditionedOperator(PlainOperator(laplace1d), q, "left", keep_intermediates=True)


@pytest.mark.unit
def test_detached_counters_are_independent(laplace1d, rng):
    """Las mvms del operador desacoplado no se cuentan en la corrida"""
    op = PlainOperator(laplace1d)
    SquaredOperator(op).detached().apply(rng.standard_normal(20))
    assert op.counters.mvms == 0


# ═══════════════════════════════════════════════════════════════════════════
# PROBLEMAS MODELO
# ═══════════════════════════════════════════════════════════════════════════

@pytest.mark.unit
def test_make_laplace_1d():
    A = make_laplace("laplace1d", 3).toarray()
    expected = np.array([[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]])
    np.testing.assert_array_equal(A, expected)


@pytest.mark.unit
def test_make_laplace_dimensions():
    """N^dim filas, diagonal 2·dim"""
    A2 = make_laplace("laplace2d", 5)
    A3 = make_laplace("laplace3d", 4)
    assert A2.shape == (25, 25)
    assert A3.shape == (64, 64)
    assert np.all(A2.diagonal() == 4.0)
    assert np.all(A3.diagonal() == 6.0)


@pytest.mark.unit
def test_laplace_spectral_interval_exact():
    """Forma cerrada = autovalores extremos"""
    lam = np.linalg.eigvalsh(make_laplace("laplace2d", 6).toarray())
    a, b = laplace_spectral_interval("laplace2d", 6)
    assert a == pytest.approx(lam[0], rel=1e-12)
    assert b == pytest.approx(lam[-1], rel=1e-12)


@pytest.mark.unit
def test_graph_laplacian_columns_sum_to_zero():
    """L = D_in − A: cada columna suma cero y el espectro está en Re ≥ 0"""
    adjacency = make_random_digraph(40, out_degree=3, seed=3)
    assert np.all(adjacency.diagonal() == 0)

    L = make_graph_laplacian(adjacency)
    np.testing.assert_allclose(np.asarray(L.sum(axis=0)).ravel(), 0.0, atol=1e-12)
    assert np.all(np.linalg.eigvals(L.toarray()).real >= -1e-10)


@pytest.mark.unit
def test_graph_laplacian_rejects_negative_weights():
    with pytest.raises(ValueError):
        make_graph_laplacian(np.array([[0.0, -1.0], [1.0, 0.0]]))


@pytest.mark.unit
def test_synthetic_nonhermitian_spectrum():
    """No simétrica, espectro estrictamente en ℂ⁺"""
    A = make_synthetic_nonhermitian(60, seed=7)
    dense = A.toarray()
    assert not np.allclose(dense, dense.T)
    assert np.all(np.linalg.eigvals(dense).real > 0)


@pytest.mark.unit
def test_make_model_problem_requires_size():
    with pytest.raises(ValueError):
        make_model_problem("laplace2d")
    with pytest.raises(ValueError):
        make_model_problem("synthetic_nonhermitian")


@pytest.mark.unit
def test_make_rhs():
    """Aleatorio normalizado y reproducible; unitario; unos"""
    b1 = make_rhs(30, "random", seed=5)
    b2 = make_rhs(30, "random", seed=5)
    assert np.linalg.norm(b1) == pytest.approx(1.0)
    np.testing.assert_array_equal(b1, b2)

    e = make_rhs(30, "unit", seed=0, index=4)
    assert e[4] == 1.0 and e.sum() == 1.0
    assert np.all(make_rhs(3, "ones", seed=0) == 1.0)

    with pytest.raises(ValueError):
        make_rhs(3, "unit", seed=0, index=3)


# ═══════════════════════════════════════════════════════════════════════════
# MATRIX MARKET
# ═══════════════════════════════════════════════════════════════════════════

@pytest.mark.unit
def test_matrix_market_write_then_read(tmp_path):
    """Los 17 dígitos preservan la matriz exactamente"""
    A = make_synthetic_nonhermitian(30, seed=2)
    path = write_matrix_market(tmp_path / "synthetic.mtx", A, comment="test")

    B = read_matrix_market(path)
    assert B.shape == A.shape
    assert abs(B - A).max() == 0.0


@pytest.mark.unit
def test_matrix_market_symmetric_expansion(tmp_path):
    """symmetric: se almacena la matriz completa"""
    path = tmp_path / "sym.mtx"
    path.write_text(
        "%%MatrixMarket matrix coordinate real symmetric\n"
        "% tridiagonal\n"
        "3 3 4\n"
        "1 1 2.0\n"
        "2 1 -1.0\n"
        "2 2 2.0\n"
        "3 3 2.0\n"
    )
    A = read_matrix_market(path).toarray()
    expected = np.array([[2.0, -1.0, 0.0], [-1.0, 2.0, 0.0], [0.0, 0.0, 2.0]])
    np.testing.assert_array_equal(A, expected)


@pytest.mark.unit
def test_matrix_market_pattern(tmp_path):
    """pattern: las entradas valen 1"""
    path = tmp_path / "pattern.mtx"
    path.write_text(
        "%%MatrixMarket matrix coordinate pattern general\n"
        "2 2 2\n"
        "1 2\n"
        "2 1\n"
    )
    np.testing.assert_array_equal(read_matrix_market(path).toarray(), [[0.0, 1.0], [1.0, 0.0]])


@pytest.mark.unit
def test_matrix_market_parse_error_line(tmp_path):
    """El error de sintaxis informa la línea"""
    path = tmp_path / "bad.mtx"
    path.write_text(
        "%%MatrixMarket matrix coordinate real general\n"
        "2 2 2\n"
        "1 1 1.0\n"
        "2 2 abc\n"
    )
    with pytest.raises(ParseError) as excinfo:
        read_matrix_market(path)
    assert excinfo.value.line == 4


@pytest.mark.unit
def test_matrix_market_array_unsupported(tmp_path):
    path = tmp_path / "array.mtx"
    path.write_text("%%MatrixMarket matrix array real general\n2 2\n1\n0\n0\n1\n")
    with pytest.raises(UnsupportedField):
        read_matrix_market(path)


@pytest.mark.unit
def test_matrix_market_missing_file(tmp_path):
    with pytest.raises(IoError):
        read_matrix_market(Path(tmp_path / "no_existe.mtx"))
