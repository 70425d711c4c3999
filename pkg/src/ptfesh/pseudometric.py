"""
Indefinite (parity) inner product and the spectral calculus built on it.

For ``H^dagger = P H P`` eigenvectors with distinct real energies are
P-orthogonal, and each gets a quasi-parity ``Q = sign <psi|P|psi>``.  A
complex-conjugate doublet ``E, E*`` has vanishing self-overlaps; its
partners are linked through ``psi_- = P conj(psi_+)`` and the off-diagonal
overlap ``c = <psi_+|P|psi_->``.  With these conventions

    I = V D V^dagger P,      D = diag(Q_n) (+) [[0, 1/c*], [1/c, 0]] per pair,

and replacing ``D`` by energy- or time-weighted versions gives the spectral
representations of ``H`` and ``exp(-iHt)``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .exceptions import ContractError, DegeneracyError, PhaseUndefinedError, StructureError
from .partitioning import normalize_pt_phase

__all__ = [
    "SpectralData",
    "PseudoNormReport",
    "pseudo_inner",
    "assign_quasi_parity",
    "pseudo_normalize",
    "pseudo_gram",
    "spectral_weights",
    "reconstruct_identity",
    "reconstruct_hamiltonian",
]

DEGENERACY_TOL = 1e-8
# a defective eigenvalue splits by ~sqrt(eps) in LAPACK, and so do the overlaps
EP_FLOOR = 16 * np.sqrt(np.finfo(float).eps)


@dataclass(frozen=True, eq=False)
class SpectralData:
    """
    Eigenvalues and right eigenvectors (columns of ``vectors``).

    ``pairs`` lists ``(plus, minus)`` index pairs of conjugate doublets with
    ``Im E_plus > 0``.  ``quasi_parities`` uses ``0`` for undefined.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    pairs: tuple = ()
    matrix: np.ndarray | None = None
    quasi_parities: np.ndarray | None = None
    pair_norms: np.ndarray | None = None
    normalized: bool = False

    @property
    def size(self) -> int:
        return self.eigenvalues.size

    @property
    def paired(self) -> set:
        return {i for pair in self.pairs for i in pair}

    @property
    def real_levels(self) -> list:
        return [i for i in range(self.size) if i not in self.paired]


@dataclass(frozen=True, eq=False)
class PseudoNormReport:
    gram: np.ndarray
    max_offdiag_violation: float
    self_norms: np.ndarray


def pseudo_inner(psi, phi, P, mode: str = "metric") -> complex:
    """
    Indefinite overlap of two vectors.

    ``metric``: ``psi^dagger P phi``.  ``bilinear``: ``psi^T phi``, the
    antilinear-T form left after ``P^2 = 1`` is dropped; it coincides with
    the metric form on PT-normalized unbroken states.
    """
    psi = np.asarray(psi)
    phi = np.asarray(phi)
    if psi.shape != phi.shape:
        raise ValueError(f"dimension mismatch: {psi.shape} vs {phi.shape}")
    if mode == "metric":
        return complex(np.vdot(psi, np.asarray(P) @ phi))
    if mode == "bilinear":
        return complex(psi @ phi)
    raise ValueError(f"unknown mode {mode!r}")


def _self_norm(psi, P) -> complex:
    return pseudo_inner(psi, psi, P)


def assign_quasi_parity(psi, P, tol: float = DEGENERACY_TOL) -> int:
    """Sign of ``<psi|P|psi>``; ``0`` when it vanishes relative to ``|psi|^2``."""
    psi = np.asarray(psi)
    s = _self_norm(psi, P)
    if abs(s) < tol * np.vdot(psi, psi).real:
        return 0
    return 1 if s.real > 0 else -1


def _fix_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def pseudo_normalize(spectral: SpectralData, P, tol: float = DEGENERACY_TOL) -> SpectralData:
    """
    Scale eigenvectors so the gram matrix is ``diag(Q_n)`` plus ``[[0, c], [c*, 0]]`` pair blocks.

    Real levels are PT-phase-normalized where possible and scaled to
    ``<psi|P|psi> = Q_n``.  For each pair ``psi_+`` is scaled to unit norm
    and ``psi_-`` replaced by ``P conj(psi_+)`` (its eigenvalue by ``conj(E_+)``).

    Raises
    ------
    DegeneracyError
        A real level (or a pair) has vanishing pseudo-norm: exceptional point.
        The cutoff is ``max(tol, 16*sqrt(eps))`` relative to the squared
        norm, since eigenvectors at a defective point are only resolved to
        ``sqrt(eps)``.
    StructureError
        ``P conj(psi_+)`` is not the partner eigenvector (H not PT-symmetric).
    """
    Pm = np.asarray(P)
    cutoff = max(tol, EP_FLOOR)
    V = np.array(spectral.vectors, dtype=complex)
    Q = np.zeros(spectral.size, dtype=int)
    unlinked = [n for n in spectral.real_levels if spectral.eigenvalues[n].imag != 0]
    if unlinked:
        raise StructureError(f"complex levels {unlinked} have no conjugate partner linked")
    for n in spectral.real_levels:
        v = V[:, n]
        try:
            v = normalize_pt_phase(v, Pm)
        except PhaseUndefinedError:
            pass
        s = _self_norm(v, Pm).real
        if abs(s) < cutoff * np.vdot(v, v).real:
            raise DegeneracyError(f"level {n} (E={spectral.eigenvalues[n]:.12g}) has vanishing pseudo-norm", n)
        V[:, n] = v / np.sqrt(abs(s))
        Q[n] = 1 if s > 0 else -1
    norms = []
    E = np.array(spectral.eigenvalues, dtype=complex)
    for p, m in spectral.pairs:
        vp = _fix_phase(V[:, p] / np.linalg.norm(V[:, p]))
        vm = Pm @ vp.conj()
        ref = V[:, m] / np.linalg.norm(V[:, m])
        if abs(abs(np.vdot(ref, vm)) - 1.0) > 1e-6:
            raise StructureError(f"P conj(psi_+) is not the partner of level {p}")
        c = pseudo_inner(vp, vm, Pm)
        if abs(c) < cutoff:
            raise DegeneracyError(f"pair ({p}, {m}) has vanishing off-diagonal pseudo-norm", p)
        V[:, p], V[:, m] = vp, vm
        E[m] = np.conj(E[p])
        norms.append(c)
    return replace(spectral, eigenvalues=E, vectors=V, quasi_parities=Q,
                   pair_norms=np.asarray(norms, dtype=complex), normalized=True)


def pseudo_gram(spectral: SpectralData, P) -> PseudoNormReport:
    """Gram matrix ``V^dagger P V`` and its largest forbidden off-diagonal entry."""
    V = spectral.vectors
    gram = V.conj().T @ np.asarray(P) @ V
    mask = ~np.eye(spectral.size, dtype=bool)
    for p, m in spectral.pairs:
        mask[p, m] = mask[m, p] = False
    off = float(np.max(np.abs(gram[mask]), initial=0.0))
    return PseudoNormReport(gram, off, np.diag(gram).copy())


def spectral_weights(spectral: SpectralData, values=None) -> np.ndarray:
    """
    Middle factor ``D`` of ``V D V^dagger P``.

    ``values`` holds one scalar per level (``f(E_n)``); ``None`` means ones.
    Real levels get ``f(E_n) Q_n``, pairs ``f(E)/c*`` and ``f(E*)/c``.
    """
    if not spectral.normalized:
        raise ContractError("spectral data must be pseudo-normalized first")
    f = np.ones(spectral.size, dtype=complex) if values is None else np.asarray(values, dtype=complex)
    D = np.zeros((spectral.size, spectral.size), dtype=complex)
    for n in spectral.real_levels:
        D[n, n] = f[n] * spectral.quasi_parities[n]
    for (p, m), c in zip(spectral.pairs, spectral.pair_norms):
        D[p, m] = f[p] / np.conj(c)
        D[m, p] = f[m] / c
    return D


def _expand(spectral: SpectralData, P, values=None) -> np.ndarray:
    V = spectral.vectors
    return V @ spectral_weights(spectral, values) @ V.conj().T @ np.asarray(P)


def reconstruct_identity(spectral: SpectralData, P) -> float:
    """Largest entry of ``|sum_n |psi_n> Q_n <psi_n|P - I|`` (pair terms included)."""
    R = _expand(spectral, P)
    return float(np.max(np.abs(R - np.eye(R.shape[0]))))


def reconstruct_hamiltonian(spectral: SpectralData, P) -> float:
    """Largest entry deviation of the spectral sum from ``H``, relative to ``max|H|``."""
    if spectral.matrix is None:
        raise ValueError("spectral data carries no source matrix")
    H = np.asarray(spectral.matrix)
    R = _expand(spectral, P, spectral.eigenvalues)
    return float(np.max(np.abs(R - H)) / max(np.max(np.abs(H)), np.finfo(float).tiny))
