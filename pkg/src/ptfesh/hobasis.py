"""
Harmonic-oscillator basis representations.

Units are those of ``H0 = p**2 + x**2``, whose eigenvalues are ``2n + 1``.
In these units ``x = (a + a^dagger) / sqrt(2)``.

Matrix powers of ``x`` are formed in a basis enlarged by the power and then
truncated, so every returned entry equals the exact infinite-basis matrix
element.  Truncation error is left to the eigenproblem alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BasisSpec",
    "OperatorMatrix",
    "ModelSpec",
    "build_position_power",
    "build_kinetic_plus_quadratic",
    "build_parity",
    "build_model",
]

SYMMETRY_TAGS = ("hermitian", "complex-symmetric", "general")


@dataclass(frozen=True)
class BasisSpec:
    """Truncated oscillator basis ``|0>, ..., |dim-1>``."""

    dim: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValueError(f"basis dimension must be an integer >= 2, got {self.dim!r}")

    @property
    def n_even(self) -> int:
        return (self.dim + 1) // 2

    @property
    def n_odd(self) -> int:
        return self.dim // 2


def _basis(basis) -> BasisSpec:
    return basis if isinstance(basis, BasisSpec) else BasisSpec(int(basis))


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """
    Dense square matrix in the oscillator basis with a symmetry tag.

    Behaves like an array under numpy (``np.asarray(op)`` gives the entries).
    """

    matrix: np.ndarray
    symmetry: str = "general"
    tol: float = field(default=1e-14, repr=False, compare=False)

    def __post_init__(self):
        m = np.array(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator matrix must be square, got shape {m.shape}")
        if self.symmetry not in SYMMETRY_TAGS:
            raise ValueError(f"unknown symmetry tag {self.symmetry!r}")
        if self.symmetry == "hermitian" and np.max(np.abs(m - m.conj().T), initial=0.0) > self.tol:
            raise ValueError("matrix tagged hermitian is not Hermitian")
        if self.symmetry == "complex-symmetric" and np.max(np.abs(m - m.T), initial=0.0) > self.tol:
            raise ValueError("matrix tagged complex-symmetric is not symmetric")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.matrix
        return self.matrix.astype(dtype)


@dataclass(frozen=True)
class ModelSpec:
    """
    Anharmonic oscillator ``p^2 + x^2 + f x^3 + g x^power``.

    Real ``f`` gives the Hermitian model, purely imaginary ``f`` the
    PT-symmetric one.
    """

    f: complex = 0.0
    g: float = 0.0
    power: int = 4

    def __post_init__(self):
        if int(self.power) != self.power or self.power < 4 or self.power % 2:
            raise ValueError(f"even power must be an even integer >= 4, got {self.power!r}")
        if np.imag(self.g) != 0:
            raise ValueError("coefficient g must be real")


def _ladder_position(n: int) -> np.ndarray:
    off = np.sqrt(np.arange(1, n) / 2.0)
    return np.diag(off, 1) + np.diag(off, -1)


def build_position_power(k: int, basis) -> OperatorMatrix:
    """
    Exact ``dim x dim`` block of ``x**k``.

    Parameters
    ----------
    k : int
        Power, ``k >= 1``.
    basis : BasisSpec or int
        Basis (or its dimension).
    """
    if int(k) != k or k < 1:
        raise ValueError(f"power k must be a positive integer, got {k!r}")
    dim = _basis(basis).dim
    x = _ladder_position(dim + k)
    xk = np.linalg.matrix_power(x, int(k))[:dim, :dim]
    # exact zeros survive; this only removes rounding asymmetry
    xk = 0.5 * (xk + xk.T)
    return OperatorMatrix(xk, "hermitian")


def build_kinetic_plus_quadratic(basis) -> OperatorMatrix:
    dim = _basis(basis).dim
    return OperatorMatrix(np.diag(2.0 * np.arange(dim) + 1.0), "hermitian")


def build_parity(basis) -> OperatorMatrix:
    dim = _basis(basis).dim
    return OperatorMatrix(np.diag((-1.0) ** np.arange(dim)), "hermitian")


def build_model(spec: ModelSpec, basis) -> OperatorMatrix:
    """
    Matrix of ``p^2 + x^2 + f x^3 + g x^(2N)`` in the truncated basis.

    The tag is ``hermitian`` for real ``f``, ``complex-symmetric`` for purely
    imaginary ``f`` and ``general`` otherwise.
    """
    basis = _basis(basis)
    f = complex(spec.f)
    h = build_kinetic_plus_quadratic(basis).matrix.astype(complex)
    if f != 0:
        h = h + f * build_position_power(3, basis).matrix
    if spec.g != 0:
        h = h + float(spec.g) * build_position_power(spec.power, basis).matrix
    if f.imag == 0:
        return OperatorMatrix(h.real.copy(), "hermitian")
    if f.real == 0:
        return OperatorMatrix(h, "complex-symmetric")
    return OperatorMatrix(h, "general")
