"""
Energy-dependent effective Hamiltonian on the even (model) sector.

For the block matrix ``[[F, alpha*A], [A^dagger, G]]`` eliminating the odd
components ``w = -(G - rho)^-1 A^dagger u`` leaves

    H_eff(rho) = F - alpha * A (G - rho)^-1 A^dagger,

Hermitian for every real ``rho`` whether the full matrix is Hermitian
(``alpha = +1``) or PT-symmetric (``alpha = -1``).  The resolvent is applied
through the cached eigendecomposition of ``G``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import PoleProximityError
from .partitioning import PartitionedHamiltonian

__all__ = [
    "EffectiveEvaluation",
    "pole_guard",
    "effective_hamiltonian",
    "effective_hamiltonian_batch",
    "linearized_spectrum",
    "branch_values",
    "reconstruct_eliminated",
    "decoupled_poles",
]


def pole_guard(rho) -> float:
    return 1e-8 * (1.0 + np.abs(rho))


@dataclass(frozen=True, eq=False)
class EffectiveEvaluation:
    rho: float
    H_eff: np.ndarray
    pole_distance: float


def _resolvent_factors(part: PartitionedHamiltonian):
    gamma, U = part.g_spectrum
    left = part.A @ U
    right = U.conj().T @ part.lower
    return gamma, left, right


def _check_pole(gamma: np.ndarray, rho: float) -> float:
    if gamma.size == 0:
        return np.inf
    dist = np.abs(gamma - rho)
    k = int(np.argmin(dist))
    if dist[k] <= pole_guard(rho):
        raise PoleProximityError(
            f"rho={rho!r} lies within the pole guard of eigenvalue {gamma[k]!r} of G", pole=float(gamma[k])
        )
    return float(dist[k])


def effective_hamiltonian(part: PartitionedHamiltonian, rho: float) -> EffectiveEvaluation:
    """
    Evaluate ``H_eff(rho) = F - alpha * A (G - rho)^-1 A^dagger``.

    Raises
    ------
    PoleProximityError
        If ``rho`` is within ``pole_guard(rho)`` of an eigenvalue of ``G``.
    """
    rho = float(rho)
    gamma, left, right = _resolvent_factors(part)
    dist = _check_pole(gamma, rho)
    w = 1.0 / (gamma - rho)
    H = part.F - part.alpha * (left * w) @ right
    return EffectiveEvaluation(rho, H, dist)


def effective_hamiltonian_batch(part: PartitionedHamiltonian, rhos) -> np.ndarray:
    """Stack of ``H_eff`` over many energies, shape ``(len(rhos), n+, n+)``; no pole check."""
    gamma, left, right = _resolvent_factors(part)
    rhos = np.asarray(rhos, dtype=float)
    w = 1.0 / (gamma[None, :] - rhos[:, None])
    return part.F[None] - part.alpha * ((left[None, :, :] * w[:, None, :]) @ right)


def linearized_spectrum(part: PartitionedHamiltonian, rho: float) -> tuple[np.ndarray, np.ndarray]:
    """
    Eigenpairs of ``H_eff(rho)`` at a fixed trial energy.

    Returns ascending eigenvalues and orthonormal eigenvectors (columns).
    """
    return np.linalg.eigh(effective_hamiltonian(part, rho).H_eff)


def branch_values(part: PartitionedHamiltonian, rhos, chunk: int = 2048) -> np.ndarray:
    """Sorted eigenvalues of ``H_eff`` on a grid, shape ``(len(rhos), n+)``."""
    rhos = np.asarray(rhos, dtype=float)
    out = np.empty((rhos.size, part.n_plus))
    for start in range(0, rhos.size, chunk):
        stack = effective_hamiltonian_batch(part, rhos[start:start + chunk])
        out[start:start + chunk] = np.linalg.eigvalsh(stack)
    return out


def reconstruct_eliminated(part: PartitionedHamiltonian, rho: float, v) -> np.ndarray:
    """
    Odd-sector components ``w = -(G - rho)^-1 A^dagger v``.

    Stacking ``(v, w)`` solves the lower block row of the full equation
    exactly; the upper row holds when ``rho`` is a self-consistent root and
    ``v`` its effective eigenvector.
    """
    rho = float(rho)
    v = np.asarray(v)
    gamma, U = part.g_spectrum
    _check_pole(gamma, rho)
    return -U @ ((U.conj().T @ (part.lower @ v)) / (gamma - rho))


def decoupled_poles(part: PartitionedHamiltonian, rtol: float = 1e-7) -> np.ndarray:
    """
    Eigenvalues of ``G`` whose eigenvectors do not couple to the model space.

    Such a pole is itself an eigenvalue of the full matrix but never a root
    of the self-consistency condition.  Returned with multiplicity.
    """
    gamma, U = part.g_spectrum
    if gamma.size == 0:
        return gamma
    scale = max(1.0, float(np.max(np.abs(part.A), initial=0.0)))
    left = part.A @ U
    right = U.conj().T @ part.lower
    out = []
    i = 0
    while i < gamma.size:
        j = i + 1
        while j < gamma.size and abs(gamma[j] - gamma[i]) <= pole_guard(gamma[i]):
            j += 1
        cols = np.vstack([left[:, i:j], right[i:j, :].T])
        sv = np.linalg.svd(cols, compute_uv=False) if cols.size else np.zeros(0)
        rank = int(np.sum(sv > rtol * scale))
        out.extend([gamma[i]] * max(0, (j - i) - rank))
        i = j
    return np.asarray(out, dtype=float)
