import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import expm_evolve, weakly_broken_blocks
from ptfesh.evolve import evolve_state, evolve_states, growth_rate, trace_conservation
from ptfesh.exceptions import ContractError
from ptfesh.hobasis import ModelSpec, build_model, build_parity
from ptfesh.oracle import direct_spectrum
from ptfesh.partitioning import PartitionedHamiltonian, assemble_full, block_parity, two_level
from ptfesh.pseudometric import pseudo_normalize

P2 = np.diag([1.0, -1.0])
TIMES = np.linspace(0, 10, 200)


def model(f, g, dim):
    H = build_model(ModelSpec(f, g), dim).matrix
    P = build_parity(dim).matrix
    return H, P, pseudo_normalize(direct_spectrum(H), P)


def toy(omega):
    H = assemble_full(two_level(omega), original=True)
    return H, P2, pseudo_normalize(direct_spectrum(H), P2)


def weakly_broken():
    part = PartitionedHamiltonian(*weakly_broken_blocks(), alpha=-1)
    H = assemble_full(part, original=True)
    P = block_parity(part)
    return H, P, pseudo_normalize(direct_spectrum(H), P)


def closed_form_2x2(H, psi0, t):
    """exp(-iHt) for a 2x2 matrix via the Cayley-Hamilton form."""
    tau = np.trace(H) / 2
    K = H - tau * np.eye(2)
    delta = np.sqrt(complex(-np.linalg.det(K)))
    if abs(delta) < 1e-14:
        U = np.eye(2) - 1j * t * K
    else:
        U = np.cos(delta * t) * np.eye(2) - 1j * np.sin(delta * t) / delta * K
    return np.exp(-1j * tau * t) * U @ psi0


def test_stationary_state():
    H, P, spec = model(0.2j, 1.0, 16)
    psi = spec.vectors[:, 2]
    for t in (0.3, 4.0):
        np.testing.assert_allclose(evolve_state(spec, P, psi, t),
                                   np.exp(-1j * spec.eigenvalues[2] * t) * psi, atol=1e-10)
    trace = trace_conservation(spec, P, psi, TIMES)
    assert np.ptp(trace.euclidean_norms) <= 1e-10


def test_time_zero_is_identity():
    H, P, spec = model(0.2j, 0.1, 20)
    psi0 = np.random.default_rng(0).normal(size=20) + 0j
    np.testing.assert_allclose(evolve_state(spec, P, psi0, 0.0), psi0, atol=1e-8)


def test_broken_toy_against_closed_form():
    H, P, spec = toy(0.6)
    e0 = np.array([1.0, 0.0], dtype=complex)
    psi1 = evolve_state(spec, P, e0, 1.0)
    np.testing.assert_allclose(psi1, closed_form_2x2(H, e0, 1.0), atol=1e-12)
    np.testing.assert_allclose(psi1, expm_evolve(H, e0, 1.0), atol=1e-12)
    assert np.linalg.norm(psi1) > 1.0
    assert np.vdot(psi1, P @ psi1) == pytest.approx(1.0, abs=1e-12)


def test_hermitian_quartic_is_unitary():
    H, P, spec = model(0, 1.0, 20)
    psi0 = np.random.default_rng(1).normal(size=20) + 1j * np.random.default_rng(2).normal(size=20)
    trace = trace_conservation(spec, P, psi0, TIMES)
    assert trace.max_pseudo_norm_drift <= 1e-8
    assert np.ptp(trace.euclidean_norms) <= 1e-10 * trace.euclidean_norms[0]


def test_unbroken_mixture_oscillates():
    H, P, spec = model(0.2j, 1.0, 20)
    psi0 = spec.vectors[:, 0] + spec.vectors[:, 1]
    trace = trace_conservation(spec, P, psi0, TIMES, keep_states=True)
    assert trace.max_pseudo_norm_drift <= 1e-8
    assert np.ptp(trace.euclidean_norms) > 1e-3
    for k in (20, 100, 199):
        np.testing.assert_allclose(trace.states[k], expm_evolve(H, psi0, TIMES[k]), atol=1e-9)


def test_broken_toy_grows_monotonically():
    H, P, spec = toy(0.6)
    trace = trace_conservation(spec, P, np.array([1.0, 0.0], dtype=complex), TIMES)
    assert trace.max_pseudo_norm_drift <= 1e-8
    assert np.all(np.diff(trace.euclidean_norms) > 0)


def test_broken_model_conserves_pseudo_norm():
    H, P, spec = weakly_broken()
    assert len(spec.pairs) == 1 and 0.3 < growth_rate(spec) < 0.4
    psi0 = np.ones(10, dtype=complex) / np.sqrt(10)
    trace = trace_conservation(spec, P, psi0, TIMES, keep_states=True)
    assert trace.max_pseudo_norm_drift <= 1e-8
    assert trace.euclidean_norms[-1] > 2 * trace.euclidean_norms[0]
    np.testing.assert_allclose(trace.states[100], expm_evolve(H, psi0, TIMES[100]), atol=1e-9)


@given(st.floats(0.01, 5.0), st.floats(0.01, 5.0))
def test_group_property(t1, t2):
    H, P, spec = toy(0.4)
    psi0 = np.array([0.6, 0.8j])
    step = evolve_state(spec, P, evolve_state(spec, P, psi0, t1), t2)
    np.testing.assert_allclose(step, evolve_state(spec, P, psi0, t1 + t2), atol=1e-8)


@pytest.mark.parametrize("f, g, dim", [(0, 1.0, 20), (0.2j, 1.0, 20), (0.2j, 0.1, 8)])
def test_generator_consistency(f, g, dim):
    # a low-lying state keeps the O(delta * |H|^2) forward-difference error small
    H, P, spec = model(f, g, dim)
    psi0 = np.zeros(dim, dtype=complex)
    psi0[:2] = [1.0, 0.5]
    delta = 1e-6
    fd = (evolve_state(spec, P, psi0, delta) - psi0) / delta
    assert np.linalg.norm(fd + 1j * H @ psi0) <= 1e-4 * np.linalg.norm(H @ psi0)


@pytest.mark.parametrize("f, g, dim", [(0, 1.0, 20), (0.2j, 1.0, 20), (0.2j, 0.1, 8)])
def test_matches_matrix_exponential(f, g, dim):
    H, P, spec = model(f, g, dim)
    psi0 = np.eye(dim)[0].astype(complex)
    for t in (0.5, 2.0, 5.0):
        ref = expm_evolve(H, psi0, t)
        assert np.linalg.norm(evolve_state(spec, P, psi0, t) - ref) <= 1e-7 * max(1.0, np.linalg.norm(ref))


def test_contract_error_without_normalization():
    spec = direct_spectrum(np.diag([1.0, 2.0]))
    with pytest.raises(ContractError):
        evolve_state(spec, P2, np.array([1.0, 0.0]), 1.0)


def test_input_validation():
    _, P, spec = toy(0.3)
    with pytest.raises(ValueError):
        evolve_state(spec, P, np.ones(3), 1.0)
    with pytest.raises(ValueError):
        trace_conservation(spec, P, np.ones(2), [0.0, 0.0, 1.0])
    with pytest.raises(ValueError):
        trace_conservation(spec, P, np.ones(2), [])


def test_overflow_guard_truncates():
    H, P, spec = model(0.2j, 0.1, 20)
    rate = growth_rate(spec)
    times = np.linspace(0, 2 * 300 / rate, 50)
    trace = trace_conservation(spec, P, np.eye(20)[0].astype(complex), times)
    assert trace.truncated_at is not None and trace.times[-1] * rate <= 300
    assert np.all(np.isfinite(trace.euclidean_norms))


def test_batch_shape():
    _, P, spec = toy(0.3)
    out = evolve_states(spec, P, np.array([1.0, 0.0]), [0.0, 1.0, 2.0])
    assert out.shape == (3, 2)
