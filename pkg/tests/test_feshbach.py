import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ptfesh.exceptions import PoleProximityError
from ptfesh.feshbach import (
    branch_values,
    decoupled_poles,
    effective_hamiltonian,
    effective_hamiltonian_batch,
    linearized_spectrum,
    reconstruct_eliminated,
)
from ptfesh.hobasis import ModelSpec, build_model, build_parity
from ptfesh.partitioning import PartitionedHamiltonian, assemble_full, parity_partition, random_partitioned, two_level


def toy(alpha, omega=0.3):
    return two_level(omega, alpha=alpha)


def test_scalar_closed_forms():
    assert effective_hamiltonian(toy(-1), 0.0).H_eff[0, 0] == pytest.approx(1.045, abs=1e-15)
    assert effective_hamiltonian(toy(1), 0.0).H_eff[0, 0] == pytest.approx(0.955, abs=1e-15)
    ev = effective_hamiltonian(toy(1), 0.0)
    assert ev.pole_distance == pytest.approx(2.0)


def test_pole_proximity():
    with pytest.raises(PoleProximityError) as err:
        effective_hamiltonian(toy(-1), 2.0)
    assert err.value.pole == 2.0
    with pytest.raises(PoleProximityError):
        effective_hamiltonian(toy(-1), 2.0 + 1e-9)
    effective_hamiltonian(toy(-1), 2.0 + 1e-6)


def test_linearized_spectrum_scalar():
    vals, vecs = linearized_spectrum(toy(-1), 1.0)
    assert vals[0] == pytest.approx(1.09, abs=1e-15)
    assert abs(vecs[0, 0]) == pytest.approx(1.0)


def test_decoupled_limit():
    part = PartitionedHamiltonian(np.diag([1.0, 4.0]), np.diag([2.0, 3.0]), np.zeros((2, 2)))
    for rho in (0.0, 1.5, 10.0):
        np.testing.assert_array_equal(linearized_spectrum(part, rho)[0], [1.0, 4.0])
    np.testing.assert_array_equal(reconstruct_eliminated(part, 0.5, [1.0, 1.0]), [0.0, 0.0])


def test_hermitian_model_real_below_poles():
    part = parity_partition(build_model(ModelSpec(0, 1.0), 20), build_parity(20).matrix)
    rho = np.min(np.linalg.eigvalsh(part.G)) - 0.5
    H = effective_hamiltonian(part, rho).H_eff
    assert np.isrealobj(H) and np.array_equal(H, H.T)


@given(st.integers(0, 10_000), st.integers(1, 6), st.integers(1, 6),
       st.sampled_from([1, -1]), st.booleans(), st.floats(-8, 8))
def test_reduction_is_hermitian(seed, n_plus, n_minus, alpha, cplx, rho):
    part = random_partitioned(np.random.default_rng(seed), n_plus, n_minus, alpha, complex_coupling=cplx)
    try:
        H = effective_hamiltonian(part, rho).H_eff
    except PoleProximityError:
        return
    assert np.max(np.abs(H - H.conj().T)) <= 1e-12 * max(1.0, np.max(np.abs(H)))


@given(st.integers(0, 10_000), st.sampled_from([1, -1]), st.floats(-8, 8))
def test_sign_flip_invariance(seed, alpha, rho):
    part = random_partitioned(np.random.default_rng(seed), 3, 4, alpha)
    flipped = part.with_coupling(-part.A)
    try:
        a = linearized_spectrum(part, rho)
    except PoleProximityError:
        return
    b = linearized_spectrum(flipped, rho)
    assert np.max(np.abs(a[0] - b[0])) <= 1e-12 * max(1.0, np.max(np.abs(a[0])))
    v = a[1][:, 0]
    np.testing.assert_allclose(reconstruct_eliminated(flipped, rho, v),
                               -reconstruct_eliminated(part, rho, v), atol=1e-12)


def _residual(part, rho, v):
    x = np.concatenate([v, reconstruct_eliminated(part, rho, v)])
    return np.linalg.norm(assemble_full(part) @ x - rho * x) / np.linalg.norm(x)


def test_reconstruction_pt_toy():
    part = toy(-1)
    w = reconstruct_eliminated(part, 1.1, np.array([1.0]))
    # the full matrix [[1, -0.3], [0.3, 2]] fixes w = -0.3/(2 - 1.1)
    assert w[0] == pytest.approx(-1 / 3, abs=1e-15)
    assert _residual(part, 1.1, np.array([1.0])) <= 1e-10


def test_reconstruction_hermitian_toy():
    part = toy(1)
    rho = (3 - np.sqrt(1.36)) / 2
    w = reconstruct_eliminated(part, rho, np.array([1.0]))
    assert w[0] == pytest.approx(-0.3 / (2 - rho), abs=1e-15)
    assert _residual(part, rho, np.array([1.0])) <= 1e-10


def test_lower_block_row_is_exact_for_any_rho():
    part = random_partitioned(np.random.default_rng(3), 3, 3, -1)
    v = np.array([0.3, -1.0, 0.5])
    rho = 0.123
    w = reconstruct_eliminated(part, rho, v)
    np.testing.assert_allclose(part.lower @ v + (part.G - rho * np.eye(3)) @ w, 0, atol=1e-12)


def test_batch_matches_single():
    part = random_partitioned(np.random.default_rng(5), 4, 3, -1, complex_coupling=True)
    rhos = np.array([-5.0, 0.1, 7.5])
    batch = effective_hamiltonian_batch(part, rhos)
    for H, rho in zip(batch, rhos):
        np.testing.assert_allclose(H, effective_hamiltonian(part, rho).H_eff, atol=1e-13)
    vals = branch_values(part, rhos, chunk=2)
    np.testing.assert_allclose(vals, [linearized_spectrum(part, r)[0] for r in rhos], atol=1e-12)


@given(st.integers(0, 10_000))
def test_hermitian_branches_decrease_below_poles(seed):
    part = random_partitioned(np.random.default_rng(seed), 3, 3, 1)
    top = np.min(part.g_spectrum[0]) - 1e-3
    rhos = np.linspace(top - 5, top, 60)
    vals = branch_values(part, rhos)
    assert np.all(np.diff(vals, axis=0) <= 1e-12)


def test_decoupled_poles():
    # second odd state does not couple to the even sector
    part = PartitionedHamiltonian(np.diag([1.0]), np.diag([2.0, 3.0]), [[0.4, 0.0]])
    np.testing.assert_array_equal(decoupled_poles(part), [3.0])
    assert decoupled_poles(two_level(0.3)).size == 0
