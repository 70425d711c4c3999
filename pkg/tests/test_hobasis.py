import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import position_power_exact, position_power_quadrature
from ptfesh.hobasis import (
    BasisSpec,
    ModelSpec,
    OperatorMatrix,
    build_kinetic_plus_quadratic,
    build_model,
    build_parity,
    build_position_power,
)

SQRT2 = np.sqrt(2.0)


def test_basis_sector_sizes():
    b = BasisSpec(5)
    assert (b.n_even, b.n_odd) == (3, 2)
    assert BasisSpec(4).n_even + BasisSpec(4).n_odd == 4


@pytest.mark.parametrize("dim", [1, 0, -3, 2.5])
def test_basis_rejects_small_or_fractional(dim):
    with pytest.raises(ValueError):
        BasisSpec(dim)


def test_position_elements_frozen():
    assert build_position_power(1, 4).matrix[0, 1] == pytest.approx(1 / SQRT2, abs=1e-15)
    assert build_position_power(3, 4).matrix[0, 1] == pytest.approx(3 / (2 * SQRT2), abs=1e-15)
    x4 = build_position_power(4, 4).matrix
    assert x4[0, 0] == pytest.approx(0.75, abs=1e-15)
    assert x4[0, 1] == 0.0


@pytest.mark.parametrize("k", [0, -1, 1.5])
def test_position_power_rejects_bad_k(k):
    with pytest.raises(ValueError):
        build_position_power(k, 4)


@pytest.mark.parametrize("k", range(1, 9))
@pytest.mark.parametrize("dim", [2, 3, 6, 12])
def test_position_power_matches_quadrature(k, dim):
    # the quadrature sum itself rounds at ~1e-15 of the entry size
    ref = position_power_quadrature(k, dim)
    got = build_position_power(k, dim).matrix
    assert np.all(np.abs(got - ref) <= 1e-10 * np.maximum(1.0, np.abs(ref)))


@pytest.mark.parametrize("k", [1, 3, 4, 6, 8])
@pytest.mark.parametrize("dim", [4, 12, 30])
def test_position_power_matches_extended_precision(k, dim):
    # absolute 1e-10 up to entries ~1e5; beyond that one float64 ulp exceeds it
    ref = position_power_exact(k, dim)
    err = np.abs(build_position_power(k, dim).matrix - ref)
    assert np.all(err <= np.maximum(1e-10, 1e-14 * np.abs(ref)))
    small = np.abs(ref) < 1e5
    assert np.max(err[small]) <= 1e-10


@given(st.integers(2, 8), st.integers(2, 25))
def test_exact_blocks_are_associative(k, dim):
    # x^k from the big basis equals (x^(k-1) * x) when both factors keep the intermediates
    big = dim + k
    xk1 = build_position_power(k - 1, big).matrix
    x1 = build_position_power(1, big).matrix
    prod = (xk1 @ x1)[:dim, :dim]
    xk = build_position_power(k, dim).matrix
    assert np.max(np.abs(xk - prod)) <= 1e-12 * max(1.0, np.max(np.abs(xk)))


@given(st.integers(1, 8), st.integers(2, 20))
def test_parity_selection_rule(k, dim):
    xk = build_position_power(k, dim).matrix
    m, n = np.indices(xk.shape)
    odd = (m + n + k) % 2 == 1
    assert np.all(xk[odd] == 0.0)
    assert np.all(xk[~odd & (np.abs(m - n) <= k)] != 0.0)


def test_kinetic_plus_quadratic():
    np.testing.assert_array_equal(build_kinetic_plus_quadratic(3).matrix, np.diag([1.0, 3.0, 5.0]))
    assert build_kinetic_plus_quadratic(40).matrix[39, 39] == 79.0
    with pytest.raises(ValueError):
        build_kinetic_plus_quadratic(1)


def test_parity_operator():
    P = build_parity(4).matrix
    np.testing.assert_array_equal(P, np.diag([1.0, -1.0, 1.0, -1.0]))
    np.testing.assert_array_equal(P @ P, np.eye(4))
    assert np.trace(build_parity(5).matrix) == 1.0


def test_harmonic_limit():
    H = build_model(ModelSpec(0, 0), 6)
    np.testing.assert_array_equal(np.asarray(H).real, np.diag(2.0 * np.arange(6) + 1))
    assert H.symmetry == "hermitian"


def test_model_cubic_entries():
    real = build_model(ModelSpec(0.5, 0.1), 4)
    assert real.symmetry == "hermitian"
    assert real.matrix[0, 1] == pytest.approx(0.5303300859, abs=1e-10)
    assert np.isrealobj(real.matrix)
    imag = build_model(ModelSpec(0.5j, 0.1), 4)
    assert imag.symmetry == "complex-symmetric"
    assert imag.matrix[0, 1] == pytest.approx(0.5303300859j, abs=1e-10)
    assert imag.matrix[1, 0] == pytest.approx(0.5303300859j, abs=1e-10)
    assert build_model(ModelSpec(0.5 + 0.5j, 0.1), 4).symmetry == "general"


def test_model_general_even_power():
    H = build_model(ModelSpec(0, 0.2, power=6), 8).matrix
    ref = np.diag(2.0 * np.arange(8) + 1) + 0.2 * position_power_quadrature(6, 8)
    assert np.max(np.abs(H - ref)) <= 1e-10


@pytest.mark.parametrize("power", [3, 5, 2, 0])
def test_model_rejects_bad_power(power):
    with pytest.raises(ValueError):
        ModelSpec(0, 1.0, power)


def test_model_rejects_complex_g():
    with pytest.raises(ValueError):
        ModelSpec(0, 1j)


@given(st.floats(-2, 2), st.floats(0, 2), st.integers(2, 30))
def test_real_f_gives_symmetric_matrix(f, g, dim):
    H = build_model(ModelSpec(f, g), dim).matrix
    np.testing.assert_array_equal(H, H.T)


@given(st.floats(-2, 2), st.floats(0, 2), st.integers(2, 30))
def test_imaginary_f_is_pt_symmetric(f, g, dim):
    H = build_model(ModelSpec(1j * f, g), dim).matrix
    P = build_parity(dim).matrix
    assert np.max(np.abs(P @ H.conj() @ P - H)) <= 1e-14 * max(1.0, np.max(np.abs(H)))


def test_operator_matrix_is_immutable_copy():
    src = np.eye(3)
    op = OperatorMatrix(src, "hermitian")
    src[0, 0] = 5.0
    assert op.matrix[0, 0] == 1.0
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 2.0
    assert op.dim == 3
    np.testing.assert_array_equal(np.asarray(op), np.eye(3))


def test_operator_matrix_validation():
    with pytest.raises(ValueError):
        OperatorMatrix(np.zeros((2, 3)), "general")
    with pytest.raises(ValueError):
        OperatorMatrix(np.eye(2), "unitary")
    with pytest.raises(ValueError):
        OperatorMatrix(np.array([[0, 1], [2, 0]]), "hermitian")
