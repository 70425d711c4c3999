"""
Ground-truth spectra.

``direct_spectrum`` diagonalizes the full (unreduced) matrix with LAPACK;
it is the independent reference every Feshbach result is checked against.
``spiked_oscillator_levels`` is the closed-form spectrum of
``p^2 + r^2 + G/r^2`` on a PT-regularized contour.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg

from .exceptions import OracleFailure
from .pseudometric import SpectralData

__all__ = ["SpikedSpec", "direct_spectrum", "link_pairs", "spiked_oscillator_levels"]

ORACLE_LIMIT = 512
REAL_SNAP = 1e-10


def _snap(evals: np.ndarray, rtol: float) -> np.ndarray:
    evals = np.asarray(evals, dtype=complex).copy()
    tiny = np.abs(evals.imag) <= rtol * (1.0 + np.abs(evals.real))
    evals[tiny] = evals[tiny].real
    return evals


def link_pairs(evals: np.ndarray, rtol: float = 1e-8) -> tuple:
    """
    Link each eigenvalue with ``Im > 0`` to the nearest unused conjugate.

    Returns ``((plus, minus), ...)`` in order of the ``plus`` index.
    """
    upper = [i for i in range(evals.size) if evals[i].imag > 0]
    lower = [i for i in range(evals.size) if evals[i].imag < 0]
    pairs = []
    for i in upper:
        if not lower:
            break
        target = np.conj(evals[i])
        dist = [abs(evals[j] - target) for j in lower]
        k = int(np.argmin(dist))
        if dist[k] <= rtol * (1.0 + abs(evals[i])):
            pairs.append((i, lower.pop(k)))
    return tuple(pairs)


def direct_spectrum(H, limit: int = ORACLE_LIMIT, snap: float = REAL_SNAP) -> SpectralData:
    """
    Full dense eigendecomposition, sorted by (real part, imaginary part).

    Hermitian input goes to ``eigh``; anything else to the general
    Hessenberg-QR solver.  Eigenvalues with ``|Im| <= snap * (1 + |Re|)``
    are made exactly real and conjugate pairs are linked.

    Raises
    ------
    OracleFailure
        If LAPACK fails to converge or the result is not finite.
    """
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("matrix must be square")
    if H.shape[0] > limit:
        raise ValueError(f"dimension {H.shape[0]} exceeds the oracle limit {limit}")
    scale = max(1.0, float(np.max(np.abs(H), initial=0.0)))
    try:
        if np.max(np.abs(H - H.conj().T), initial=0.0) <= 1e-14 * scale:
            evals, vecs = scipy.linalg.eigh(H)
        else:
            evals, vecs = scipy.linalg.eig(H)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise OracleFailure(f"dense eigensolver failed: {exc}") from exc
    if not (np.all(np.isfinite(evals)) and np.all(np.isfinite(vecs))):
        raise OracleFailure("dense eigensolver returned non-finite values")
    evals = _snap(evals, snap)
    order = np.lexsort((evals.imag, evals.real))
    evals = evals[order]
    vecs = np.asarray(vecs, dtype=complex)[:, order]
    vecs = vecs / np.linalg.norm(vecs, axis=0)
    return SpectralData(evals, vecs, link_pairs(evals), matrix=H)


class SpikedSpec:
    """Spiked oscillator ``p^2 + r^2 + G/r^2`` with levels ``n = 0..n_max``."""

    def __init__(self, G: float, n_max: int = 0):
        if int(n_max) != n_max or n_max < 0:
            raise ValueError("n_max must be a non-negative integer")
        self.G = float(G)
        self.n_max = int(n_max)

    def __repr__(self):
        return f"SpikedSpec(G={self.G!r}, n_max={self.n_max!r})"


def spiked_oscillator_levels(spec: SpikedSpec) -> list[tuple[int, int, complex]]:
    """
    Closed-form levels ``(n, Q, E)`` of the spiked harmonic oscillator.

    For ``G >= -1/4``: ``E = 4n + 2 - 2 Q sqrt(G + 1/4)`` (real);
    for ``G < -1/4``: ``E = 4n + 2 - 2 i Q sqrt(-G - 1/4)``.
    At ``G = -1/4`` both quasi-parities give ``4n + 2``.
    """
    out = []
    shift = spec.G + 0.25
    for n in range(spec.n_max + 1):
        for Q in (1, -1):
            if shift >= 0:
                E = complex(4 * n + 2 - 2 * Q * math.sqrt(shift), 0.0)
            else:
                E = complex(4 * n + 2, -2 * Q * math.sqrt(-shift))
            out.append((n, Q, E))
    return out
