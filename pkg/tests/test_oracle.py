import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import two_level_roots
from ptfesh.exceptions import OracleFailure
from ptfesh.oracle import SpikedSpec, direct_spectrum, link_pairs, spiked_oscillator_levels


def test_hermitian_two_by_two():
    ev = direct_spectrum([[1, 0.6], [0.6, 2]]).eigenvalues
    # (3 -+ sqrt(2.44))/2
    np.testing.assert_allclose(ev, two_level_roots(0.6, 1), atol=1e-12)
    np.testing.assert_allclose(ev.real, [0.7189750324093346, 2.2810249675906654], atol=1e-10)
    assert np.all(ev.imag == 0)


def test_pt_two_by_two_pair():
    spec = direct_spectrum([[1, -0.6], [0.6, 2]])
    ev = spec.eigenvalues
    assert np.allclose(np.sort(ev.imag), [-0.3316624790355400, 0.3316624790355400], atol=1e-10)
    np.testing.assert_allclose(ev.real, 1.5, atol=1e-12)
    assert len(spec.pairs) == 1
    p, m = spec.pairs[0]
    assert ev[p].imag > 0 and ev[m].imag < 0


def test_identity():
    spec = direct_spectrum(np.eye(2))
    np.testing.assert_array_equal(spec.eigenvalues, [1, 1])
    np.testing.assert_allclose(np.linalg.norm(spec.vectors, axis=0), 1.0)


def test_vectors_are_eigenvectors():
    rng = np.random.default_rng(0)
    M = rng.normal(size=(8, 8))
    spec = direct_spectrum(M)
    for k in range(8):
        v = spec.vectors[:, k]
        assert np.linalg.norm(M @ v - spec.eigenvalues[k] * v) <= 1e-12 * np.linalg.norm(M)
    order = np.lexsort((spec.eigenvalues.imag, spec.eigenvalues.real))
    np.testing.assert_array_equal(order, np.arange(8))


@given(st.integers(0, 10_000), st.integers(2, 12))
def test_real_input_spectrum_is_conjugation_closed(seed, n):
    M = np.random.default_rng(seed).normal(size=(n, n))
    spec = direct_spectrum(M)
    ev = spec.eigenvalues
    n_complex = np.count_nonzero(ev.imag)
    assert 2 * len(spec.pairs) == n_complex
    for p, m in spec.pairs:
        assert abs(ev[p] - np.conj(ev[m])) <= 1e-8 * (1 + abs(ev[p]))


def test_real_snapping():
    M = np.array([[1.0, 1e-6], [-1e-6, 1.0 + 1e-3]])
    ev = direct_spectrum(M).eigenvalues
    assert np.all(ev.imag == 0)


def test_failures():
    with pytest.raises(OracleFailure):
        direct_spectrum([[np.nan, 0], [0, 1]])
    with pytest.raises(ValueError):
        direct_spectrum(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        direct_spectrum(np.eye(5), limit=4)


def test_link_pairs_leaves_unmatched():
    assert link_pairs(np.array([1 + 1j, 2 - 1j])) == ()
    assert link_pairs(np.array([1 + 1j, 1 - 1j, 3.0])) == ((0, 1),)


def test_spiked_harmonic_limit():
    levels = spiked_oscillator_levels(SpikedSpec(0.0, 2))
    energies = sorted(E.real for _, _, E in levels)
    assert energies == [1, 3, 5, 7, 9, 11]
    assert all(E.imag == 0 for _, _, E in levels)


def test_spiked_threshold_degenerates():
    levels = spiked_oscillator_levels(SpikedSpec(-0.25, 3))
    for n, Q, E in levels:
        assert E == 4 * n + 2


def test_spiked_broken_pairs():
    levels = spiked_oscillator_levels(SpikedSpec(-0.5, 2))
    for n, Q, E in levels:
        assert E.real == 4 * n + 2
        assert E.imag == -Q * 1.0


@given(st.floats(-5, 5), st.integers(0, 4))
def test_spiked_structure(G, n_max):
    levels = spiked_oscillator_levels(SpikedSpec(G, n_max))
    assert len(levels) == 2 * (n_max + 1)
    assert [Q for _, Q, _ in levels[:2]] == [1, -1]
    for (n, _, Ep), (_, _, Em) in zip(levels[::2], levels[1::2]):
        if G >= -0.25:
            assert Ep.imag == Em.imag == 0 and Ep.real + Em.real == pytest.approx(2 * (4 * n + 2))
        else:
            assert Ep == np.conj(Em)


def test_spiked_continuity_at_threshold():
    below = spiked_oscillator_levels(SpikedSpec(-0.25 - 1e-12, 1))
    above = spiked_oscillator_levels(SpikedSpec(-0.25 + 1e-12, 1))
    for (_, _, a), (_, _, b) in zip(below, above):
        assert abs(a - b) <= 1e-5


def test_spiked_spec_validation():
    with pytest.raises(ValueError):
        SpikedSpec(0.0, -1)
    with pytest.raises(ValueError):
        SpikedSpec(0.0, 1.5)
