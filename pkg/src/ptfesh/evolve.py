"""
Time evolution ``psi(t) = exp(-iHt) psi(0)`` from pseudo-normalized spectral data.

    psi(t) = sum_real |psi_n> Q_n exp(-i E_n t) <psi_n|P|psi0>
           + sum_pairs |psi_+> exp(-i E t)/c* <psi_-|P|psi0>
                     + |psi_-> exp(-i E* t)/c <psi_+|P|psi0>

The indefinite product ``<psi(t)|P|psi(t)>`` is conserved in both the
unbroken and the broken phase even though the Euclidean norm is not.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ContractError
from .pseudometric import SpectralData, spectral_weights

__all__ = ["EvolutionTrace", "evolve_state", "evolve_states", "trace_conservation", "growth_rate"]

# exp(300) ~ 1e130 keeps the squared norms finite
OVERFLOW_EXPONENT = 300.0


@dataclass(frozen=True, eq=False)
class EvolutionTrace:
    times: np.ndarray
    pseudo_norms: np.ndarray
    euclidean_norms: np.ndarray
    states: np.ndarray | None = None
    truncated_at: float | None = None

    @property
    def max_pseudo_norm_drift(self) -> float:
        """``max_t |<psi(t)|P|psi(t)> - <psi(0)|P|psi(0)>| / (1 + |<psi(0)|P|psi(0)>|)``."""
        ref = self.pseudo_norms[0]
        return float(np.max(np.abs(self.pseudo_norms - ref)) / (1.0 + abs(ref)))


def _check(spectral: SpectralData, psi0) -> np.ndarray:
    if not spectral.normalized:
        raise ContractError("spectral data must be pseudo-normalized before evolution")
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (spectral.vectors.shape[0],):
        raise ValueError(f"initial state has shape {psi0.shape}, expected {(spectral.vectors.shape[0],)}")
    return psi0


def evolve_states(spectral: SpectralData, P, psi0, times) -> np.ndarray:
    """States at each time, shape ``(len(times), dim)``."""
    psi0 = _check(spectral, psi0)
    V = spectral.vectors
    # <psi_k|P|psi0> for every level k
    overlaps = V.conj().T @ (np.asarray(P) @ psi0)
    D = spectral_weights(spectral)
    E = spectral.eigenvalues
    times = np.atleast_1d(np.asarray(times, dtype=float))
    phases = np.exp(-1j * np.outer(times, E))
    # D mixes a level with its pair partner, so the phase belongs to the row index
    coeffs = phases * (D @ overlaps)[None, :]
    return coeffs @ V.T


def evolve_state(spectral: SpectralData, P, psi0, t: float) -> np.ndarray:
    """
    Propagate ``psi0`` to time ``t`` with the spectral sum.

    Raises
    ------
    ContractError
        If ``spectral`` has not been through ``pseudo_normalize``.
    """
    return evolve_states(spectral, P, psi0, [t])[0]


def growth_rate(spectral: SpectralData) -> float:
    """Largest ``Im E``: the exponential growth rate of the broken modes."""
    return float(max(0.0, np.max(spectral.eigenvalues.imag, initial=0.0)))


def trace_conservation(spectral: SpectralData, P, psi0, times, keep_states: bool = False) -> EvolutionTrace:
    """
    Record the indefinite and Euclidean norms along the trajectory.

    Times at which the fastest growing mode would exceed ``exp(300)`` are
    dropped; ``truncated_at`` then holds the first dropped time.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1-d sequence")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    rate = growth_rate(spectral)
    keep = rate * np.abs(times) <= OVERFLOW_EXPONENT
    truncated = None if keep.all() else float(times[~keep][0])
    times = times[keep]
    if times.size == 0:
        raise ValueError(f"growth rate {rate:.3g} overflows before the first time point")
    states = evolve_states(spectral, P, psi0, times)
    Pm = np.asarray(P)
    pseudo = np.einsum("ti,ij,tj->t", states.conj(), Pm, states)
    euclid = np.linalg.norm(states, axis=1)
    return EvolutionTrace(times, pseudo, euclid, states if keep_states else None, truncated)
