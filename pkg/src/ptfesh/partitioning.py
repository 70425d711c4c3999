"""
Parity partitioning of Hamiltonians into the block form

    [[F, alpha*A], [A^dagger, G]]

with the even sector first.  ``alpha = +1`` is the Hermitian case and
``alpha = -1`` the PT-symmetric one after the odd-sector amplitudes have been
rotated by ``i``.  In the PT case the blocks are real and the assembled
matrix is real but not symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exceptions import PhaseUndefinedError, StructureError

__all__ = [
    "PartitionedHamiltonian",
    "PtStructureReport",
    "parity_partition",
    "assemble_full",
    "block_parity",
    "validate_pt_structure",
    "normalize_pt_phase",
    "two_level",
    "random_partitioned",
]

STRUCTURE_TOL = 1e-10
BLOCK_TOL = 1e-12
PHASE_TOL = 1e-7
PROVENANCE = ("hermitian-model", "pt-model", "custom")


def _max_abs(a) -> float:
    return float(np.max(np.abs(a), initial=0.0))


def _realify(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    if np.iscomplexobj(a) and not np.any(a.imag):
        return a.real.copy()
    return a


@dataclass(frozen=True, eq=False)
class PartitionedHamiltonian:
    """
    Blocks of a parity-partitioned Hamiltonian.

    ``coupling_lower`` overrides the lower-left block (``A^dagger`` by
    default).  It exists only to represent inconsistent custom inputs.
    """

    F: np.ndarray
    G: np.ndarray
    A: np.ndarray
    alpha: int = 1
    provenance: str = "custom"
    coupling_lower: np.ndarray | None = None

    def __post_init__(self):
        F = _realify(np.atleast_2d(np.asarray(self.F)))
        G = _realify(np.atleast_2d(np.asarray(self.G)))
        A = _realify(np.asarray(self.A))
        if A.ndim == 1:
            A = A.reshape(F.shape[0], -1)
        if self.alpha not in (1, -1):
            raise ValueError(f"alpha must be +1 or -1, got {self.alpha!r}")
        if self.provenance not in PROVENANCE:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if F.shape[0] != F.shape[1] or G.shape[0] != G.shape[1]:
            raise ValueError("diagonal blocks must be square")
        if A.shape != (F.shape[0], G.shape[0]):
            raise ValueError(f"coupling block has shape {A.shape}, expected {(F.shape[0], G.shape[0])}")
        for name, blk in (("F", F), ("G", G)):
            if _max_abs(blk - blk.conj().T) > BLOCK_TOL * max(1.0, _max_abs(blk)):
                raise ValueError(f"block {name} is not Hermitian")
        lower = self.coupling_lower
        if lower is not None:
            lower = _realify(np.asarray(lower))
            if lower.shape != (G.shape[0], F.shape[0]):
                raise ValueError("lower coupling block has the wrong shape")
            object.__setattr__(self, "coupling_lower", np.ascontiguousarray(lower))
        # contiguous storage keeps BLAS summation order independent of how
        # the blocks were sliced, so A -> -A is bitwise sign-symmetric
        object.__setattr__(self, "F", np.ascontiguousarray(F))
        object.__setattr__(self, "G", np.ascontiguousarray(G))
        object.__setattr__(self, "A", np.ascontiguousarray(A))

    @property
    def n_plus(self) -> int:
        return self.F.shape[0]

    @property
    def n_minus(self) -> int:
        return self.G.shape[0]

    @property
    def dim(self) -> int:
        return self.n_plus + self.n_minus

    @property
    def lower(self) -> np.ndarray:
        """Lower-left coupling block (``A^dagger`` unless overridden)."""
        if self.coupling_lower is not None:
            return self.coupling_lower
        return self.A.conj().T

    @cached_property
    def g_spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues and eigenvectors of ``G``; the resolvent poles."""
        return np.linalg.eigh(self.G)

    def with_coupling(self, A) -> "PartitionedHamiltonian":
        """Copy with a new coupling block (used for sign flips and sweeps)."""
        return PartitionedHamiltonian(self.F, self.G, A, self.alpha, self.provenance)


def _split(H: np.ndarray, P) -> tuple[np.ndarray, np.ndarray]:
    P = np.asarray(P)
    if P.shape != H.shape:
        raise ValueError("parity and Hamiltonian shapes differ")
    d = np.diag(P).real
    if _max_abs(P - np.diag(d)) > 0 or not np.all(np.abs(np.abs(d) - 1) == 0):
        raise ValueError("parity must be diagonal with entries +1/-1")
    return np.flatnonzero(d > 0), np.flatnonzero(d < 0)


def parity_partition(H, P, tol: float = STRUCTURE_TOL) -> PartitionedHamiltonian:
    """
    Partition ``H`` into even (``F``) and odd (``G``) blocks.

    Hermitian input gives ``alpha = +1`` with ``A`` the even-odd block.
    Complex-symmetric PT-symmetric input, whose even-odd block is ``i*A``
    with real ``A``, gives ``alpha = -1`` and real ``A``.

    Raises
    ------
    StructureError
        If ``H`` is neither, within ``tol`` scaled by ``max(1, max|H|)``.
    """
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("Hamiltonian must be square")
    even, odd = _split(H, P)
    scale = max(1.0, _max_abs(H))
    herm = _max_abs(H - H.conj().T)
    if herm <= tol * scale:
        return PartitionedHamiltonian(
            H[np.ix_(even, even)], H[np.ix_(odd, odd)], H[np.ix_(even, odd)],
            alpha=1, provenance="hermitian-model",
        )
    Pm = np.asarray(P)
    pt = max(_max_abs(Pm @ H.conj() @ Pm - H), _max_abs(H - H.T))
    if pt <= tol * scale:
        return PartitionedHamiltonian(
            H[np.ix_(even, even)].real, H[np.ix_(odd, odd)].real, H[np.ix_(even, odd)].imag,
            alpha=-1, provenance="pt-model",
        )
    raise StructureError(
        f"matrix is neither Hermitian nor PT-symmetric (violation {min(herm, pt):.3e})",
        violation=min(herm, pt),
    )


def assemble_full(part: PartitionedHamiltonian, original: bool = False) -> np.ndarray:
    """
    Full matrix ``[[F, alpha*A], [lower, G]]`` in block (even-first) order.

    With ``original=True`` and ``alpha = -1`` the odd-sector phase rotation
    is undone, returning the complex-symmetric PT form ``[[F, iA], [iA^T, G]]``.
    """
    top = np.hstack([part.F, part.alpha * part.A])
    bottom = np.hstack([part.lower, part.G])
    M = np.vstack([top, bottom])
    if original and part.alpha == -1:
        s = np.concatenate([np.ones(part.n_plus), np.full(part.n_minus, 1j)])
        M = s[:, None] * M / s[None, :]
    return M


def block_parity(part: PartitionedHamiltonian) -> np.ndarray:
    """Parity in block order: ``diag(+1,...,+1, -1,...,-1)``."""
    return np.diag(np.concatenate([np.ones(part.n_plus), -np.ones(part.n_minus)]))


@dataclass(frozen=True, eq=False)
class PtStructureReport:
    F_block: np.ndarray
    G_block: np.ndarray
    C_block: np.ndarray
    D_block: np.ndarray
    max_violation: float
    tolerance: float

    @property
    def pt_symmetric(self) -> bool:
        return self.max_violation <= self.tolerance


def validate_pt_structure(H, P, tol: float = STRUCTURE_TOL) -> PtStructureReport:
    """
    Expand ``H`` over PT-even (``|S>``) and PT-odd (``|L>``) basis states.

    ``H = S F S^T + L G L^T + i S C L^T + i L D S^T``; PT symmetry holds iff
    all four coefficient blocks are real.  The violation is the largest
    imaginary part on the diagonal blocks or real part on the off-diagonal
    ones.  Never raises on non-PT input.
    """
    H = np.asarray(H, dtype=complex)
    even, odd = _split(H, P)
    ee, oo = H[np.ix_(even, even)], H[np.ix_(odd, odd)]
    eo, oe = H[np.ix_(even, odd)] / 1j, H[np.ix_(odd, even)] / 1j
    violation = max(_max_abs(ee.imag), _max_abs(oo.imag), _max_abs(eo.imag), _max_abs(oe.imag))
    return PtStructureReport(ee.real, oo.real, eo.real, oe.real, violation,
                             tol * max(1.0, _max_abs(H)))


def normalize_pt_phase(psi, P, tol: float = PHASE_TOL) -> np.ndarray:
    """
    Rotate ``psi`` by ``exp(i*beta)`` so that ``P conj(psi) = psi``.

    If ``PT psi = exp(i*phi) psi`` then ``beta = phi/2``.  The remaining sign
    is fixed by making the largest even component positive (the largest odd
    component positive-imaginary when no even weight is present).

    Raises
    ------
    PhaseUndefinedError
        If ``psi`` is not a PT eigenvector within ``tol`` (relative).
    """
    psi = np.asarray(psi, dtype=complex)
    Pm = np.asarray(P)
    norm2 = np.vdot(psi, psi).real
    if norm2 == 0:
        raise ValueError("zero vector has no PT phase")
    image = Pm @ psi.conj()
    overlap = np.vdot(psi, image) / norm2
    if np.linalg.norm(image - overlap * psi) > tol * np.sqrt(norm2) or abs(abs(overlap) - 1) > tol:
        raise PhaseUndefinedError("vector is not an eigenstate of PT (broken phase?)")
    out = np.exp(0.5j * np.angle(overlap)) * psi
    parity = np.diag(Pm).real
    even = np.where(parity > 0, np.abs(out), -1.0)
    if even.max() > 0.5 * tol * np.sqrt(norm2):
        k = int(np.argmax(even))
        sign = np.sign(out[k].real)
    else:
        k = int(np.argmax(np.abs(out)))
        sign = np.sign(out[k].imag)
    return out * (sign if sign != 0 else 1.0)


def two_level(omega: float, alpha: int = -1, f: float = 1.0, g: float = 2.0) -> PartitionedHamiltonian:
    """The 2x2 model ``[[f, alpha*omega], [omega, g]]``."""
    return PartitionedHamiltonian([[f]], [[g]], [[omega]], alpha=alpha, provenance="custom")


def random_partitioned(rng: np.random.Generator, n_plus: int, n_minus: int, alpha: int,
                       complex_coupling: bool = False, scale: float = 1.0) -> PartitionedHamiltonian:
    """Random instance with symmetric ``F``, ``G`` spread over a few units."""
    def sym(n):
        m = rng.normal(size=(n, n))
        return 0.5 * (m + m.T) + np.diag(rng.uniform(-3, 3, size=n))
    A = rng.normal(size=(n_plus, n_minus)) * scale
    if complex_coupling:
        A = A + 1j * rng.normal(size=(n_plus, n_minus)) * scale
    return PartitionedHamiltonian(sym(n_plus), sym(n_minus), A, alpha=alpha)
