"""
Self-consistent roots ``rho = E_n(rho)`` of the effective Hamiltonian.

Between consecutive poles of ``(G - rho)^-1`` the sorted eigenvalues
``E_n(rho)`` of ``H_eff(rho)`` are continuous, so every simple root of
``g_n(rho) = E_n(rho) - rho`` shows up as a sign change on a fine enough
grid.  Pairs of roots closer than the grid spacing (the approach to PT
breaking) are caught by minimizing ``|g_n|`` around local minima of the
sampled values; a tangency within ``tol`` is reported as a double root.

Roots that disappear are the complex-conjugate pairs of the full spectrum;
those are taken from the dense oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .exceptions import CoverageError, DegenerateIntervalError, RootCountError
from .feshbach import branch_values, decoupled_poles, effective_hamiltonian, pole_guard
from .hobasis import ModelSpec, build_model, build_parity
from .oracle import direct_spectrum
from .partitioning import PartitionedHamiltonian, assemble_full, block_parity, parity_partition

__all__ = [
    "SelfConsistentRoot",
    "BreakingReport",
    "PhaseDiagramRow",
    "spectral_interval",
    "solve_selfconsistent",
    "detect_breaking",
    "model_family",
    "coupling_family",
    "sweep",
    "phase_boundary",
]

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class SelfConsistentRoot:
    level_index: int
    energy: float
    residual: float
    bracket: tuple[float, float]
    classification: str = "real-root"
    branch: int = -1


@dataclass(frozen=True, eq=False)
class BreakingReport:
    total_dim: int
    roots: list
    missing_pairs: int
    complex_pairs: list
    boundary_flag: bool
    oracle_eigenvalues: np.ndarray = field(repr=False)

    @property
    def real_roots_found(self) -> int:
        return len(self.roots)

    @property
    def energies(self) -> np.ndarray:
        """Real roots plus recovered complex pairs, sorted by (Re, Im)."""
        vals = [complex(r.energy) for r in self.roots]
        for e, ec in self.complex_pairs:
            vals.extend([e, ec])
        vals = np.asarray(vals, dtype=complex)
        return vals[np.lexsort((vals.imag, vals.real))] if vals.size else vals


@dataclass(frozen=True, eq=False)
class PhaseDiagramRow:
    param: float
    energies: np.ndarray
    self_pseudo_norms: np.ndarray
    broken_count: int
    boundary_flag: bool = False
    error: str | None = None


def spectral_interval(part: PartitionedHamiltonian, pad: float = 1.0) -> tuple[float, float]:
    """Gershgorin bound on the real parts of the full spectrum, padded."""
    M = assemble_full(part)
    radius = np.sum(np.abs(M), axis=1) - np.abs(np.diag(M))
    centre = np.diag(M).real
    return float(np.min(centre - radius) - pad), float(np.max(centre + radius) + pad)


def _segments(lo: float, hi: float, poles: np.ndarray, points_per_unit: float,
              min_points: int, max_points: int) -> list[np.ndarray]:
    """Scan grids for each open interval between consecutive poles."""
    inner = []
    for p in np.unique(poles):
        if lo < p < hi and (not inner or p - inner[-1] > 2 * pole_guard(p)):
            inner.append(float(p))
    edges = [lo] + inner + [hi]
    is_pole = [False] + [True] * len(inner) + [False]
    # an interval end sitting on a pole must also be guarded
    for k in (0, -1):
        if poles.size and np.min(np.abs(poles - edges[k])) <= 4 * pole_guard(edges[k]):
            is_pole[k] = True
    grids = []
    for (a, b, pa, pb) in zip(edges[:-1], edges[1:], is_pole[:-1], is_pole[1:]):
        a2 = a + 4 * pole_guard(a) if pa else a
        b2 = b - 4 * pole_guard(b) if pb else b
        if not a2 < b2:
            continue
        n = int(min(max(min_points, math.ceil(points_per_unit * (b2 - a2))), max_points))
        pts = [np.linspace(a2, b2, n)]
        half = 0.5 * (b2 - a2)
        for anchor, is_p, direction in ((a, pa, 1.0), (b, pb, -1.0)):
            if not is_p:
                continue
            d = half / 2
            extra = []
            while d > 4 * pole_guard(anchor):
                extra.append(anchor + direction * d)
                d /= 2
            pts.append(np.asarray(extra))
        grid = np.unique(np.concatenate(pts))
        grids.append(grid[(grid >= a2) & (grid <= b2)])
    return grids


def _branch_fn(part: PartitionedHamiltonian, n: int) -> Callable[[float], float]:
    def g(rho: float) -> float:
        return float(np.linalg.eigvalsh(effective_hamiltonian(part, rho).H_eff)[n] - rho)
    return g


def _branch_slope(part: PartitionedHamiltonian, n: int) -> Callable[[float], float]:
    """``d g_n / d rho`` by Hellmann-Feynman: ``v^dagger (dH_eff/drho) v - 1``."""
    gamma, U = part.g_spectrum
    left = part.A @ U
    right = U.conj().T @ part.lower

    def dg(rho: float) -> float:
        _, vecs = np.linalg.eigh(effective_hamiltonian(part, rho).H_eff)
        v = vecs[:, n]
        dH = -part.alpha * (left / (gamma - rho) ** 2) @ right
        return float(np.vdot(v, dH @ v).real - 1.0)
    return dg


def _extremum(fn, dfn, a: float, b: float, sign: float, xtol: float) -> float:
    da, db = dfn(a), dfn(b)
    if da * db < 0:
        return brentq(dfn, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
    res = minimize_scalar(lambda x: sign * fn(x), bounds=(a, b), method="bounded",
                          options={"xatol": xtol})
    return float(res.x)


def _roots_on_grid(part, grid: np.ndarray, tol: float, xtol: float) -> list[tuple]:
    vals = branch_values(part, grid) - grid[:, None]
    found = []
    for n in range(vals.shape[1]):
        g = vals[:, n]
        fn = _branch_fn(part, n)
        dfn = _branch_slope(part, n)

        def polish(a, b):
            x = brentq(fn, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
            found.append((x, abs(fn(x)), (a, b), n))

        for i in np.flatnonzero(g == 0):
            found.append((float(grid[i]), 0.0, (float(grid[i]), float(grid[i])), n))
        for i in np.flatnonzero(g[:-1] * g[1:] < 0):
            polish(grid[i], grid[i + 1])
        # close root pairs: local minima of |g| without a sign change
        ag = np.abs(g)
        mid, left, right = g[1:-1], g[:-2], g[2:]
        same = (mid != 0) & (np.sign(left) == np.sign(mid)) & (np.sign(mid) == np.sign(right))
        dip = (ag[1:-1] <= ag[:-2]) & (ag[1:-1] <= ag[2:])
        shallow = ag[1:-1] <= 2 * np.maximum(np.abs(left - mid), np.abs(right - mid))
        for i in np.flatnonzero(same & dip & shallow) + 1:
            s = np.sign(g[i])
            a, b = float(grid[i - 1]), float(grid[i + 1])
            x = _extremum(fn, dfn, a, b, s, xtol)
            gx = fn(x)
            if s * gx < 0:
                polish(a, x)
                polish(x, b)
            elif abs(gx) <= tol:
                found.append((x, abs(gx), (a, b), n))
                found.append((x, abs(gx), (a, b), n))
    return found


def solve_selfconsistent(part: PartitionedHamiltonian, interval: Sequence[float] | None = None,
                         tol: float = DEFAULT_TOL, points_per_unit: float = 64,
                         min_points: int = 8, max_points: int = 1024) -> list[SelfConsistentRoot]:
    """
    All real solutions of ``rho = E_n(rho)`` inside ``interval``.

    Roots sitting on decoupled poles of the resolvent are not returned; see
    ``detect_breaking``.  Output is sorted by energy and deterministic.

    Raises
    ------
    DegenerateIntervalError
        If the interval is empty or lies entirely inside pole guards.
    """
    lo, hi = spectral_interval(part) if interval is None else map(float, interval)
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise DegenerateIntervalError(f"invalid interval [{lo}, {hi}]")
    if tol <= 0:
        raise ValueError("tol must be positive")
    gamma, _ = part.g_spectrum
    grids = [g for g in _segments(lo, hi, gamma, points_per_unit, min_points, max_points) if g.size]
    if not grids:
        raise DegenerateIntervalError(f"no admissible grid point in [{lo}, {hi}]")
    raw = []
    for grid in grids:
        xtol = 1e-15 * max(1.0, float(np.max(np.abs(grid))))
        raw.extend(_roots_on_grid(part, grid, tol, xtol) if grid.size > 1 else [])
    raw.sort(key=lambda r: (r[0], r[3]))
    return [SelfConsistentRoot(k, float(x), float(res), (float(a), float(b)), "real-root", int(n))
            for k, (x, res, (a, b), n) in enumerate(raw)]


def _pair_up(evals: np.ndarray) -> list[tuple[complex, complex]]:
    upper = sorted((e for e in evals if e.imag > 0), key=lambda e: (e.real, e.imag))
    return [(complex(e), complex(np.conj(e))) for e in upper]


def detect_breaking(part: PartitionedHamiltonian, interval: Sequence[float] | None = None,
                    tol: float = DEFAULT_TOL, **grid) -> BreakingReport:
    """
    Count real self-consistent roots against the full dimension.

    Decoupled poles are added as ``pole-adjacent`` roots.  The shortfall is
    filled by the oracle's complex-conjugate pairs, taking those with the
    largest ``|Im E|`` first.  ``boundary_flag`` marks two real roots within
    ``100*tol`` of each other (a merging doublet).

    Raises
    ------
    CoverageError
        If some oracle eigenvalue has its real part outside ``interval``.
    RootCountError
        If the root count exceeds the dimension or has the wrong parity.
    """
    lo, hi = spectral_interval(part) if interval is None else map(float, interval)
    oracle = direct_spectrum(assemble_full(part)).eigenvalues
    outside = [e for e in oracle if not lo <= e.real <= hi]
    if outside:
        raise CoverageError(f"interval [{lo}, {hi}] excludes eigenvalue {outside[0]}", outside[0])
    roots = solve_selfconsistent(part, (lo, hi), tol, **grid)
    poles = [p for p in decoupled_poles(part) if lo <= p <= hi]
    roots = roots + [SelfConsistentRoot(-1, float(p), 0.0, (float(p), float(p)), "pole-adjacent")
                     for p in poles]
    roots.sort(key=lambda r: r.energy)
    roots = [SelfConsistentRoot(k, r.energy, r.residual, r.bracket, r.classification, r.branch)
             for k, r in enumerate(roots)]
    shortfall = part.dim - len(roots)
    if shortfall < 0 or shortfall % 2:
        raise RootCountError(f"{len(roots)} real roots found for dimension {part.dim}")
    pairs = _pair_up(oracle)
    pairs.sort(key=lambda pr: -abs(pr[0].imag))
    chosen = sorted(pairs[: shortfall // 2], key=lambda pr: (pr[0].real, pr[0].imag))
    if len(chosen) < shortfall // 2:
        raise RootCountError(
            f"{shortfall // 2} roots missing but the oracle has only {len(pairs)} complex pairs")
    energies = np.array([r.energy for r in roots])
    boundary = bool(energies.size > 1 and np.min(np.diff(energies)) <= 100 * tol)
    return BreakingReport(part.dim, roots, shortfall // 2, chosen, boundary, oracle)


def model_family(spec: ModelSpec, param: str, dim: int) -> Callable[[float], PartitionedHamiltonian]:
    """
    One-parameter family of partitioned anharmonic models.

    ``param`` is ``f_re``, ``f_im`` (real or imaginary part of the cubic
    coupling) or ``g``; the other coefficients come from ``spec``.
    """
    if param not in ("f_re", "f_im", "g"):
        raise ValueError(f"unknown sweep parameter {param!r}")
    P = build_parity(dim)

    def build(value: float) -> PartitionedHamiltonian:
        f = complex(spec.f)
        if param == "f_re":
            s = ModelSpec(complex(value, f.imag), spec.g, spec.power)
        elif param == "f_im":
            s = ModelSpec(complex(f.real, value), spec.g, spec.power)
        else:
            s = ModelSpec(f, value, spec.power)
        return parity_partition(build_model(s, dim), P)
    return build


def coupling_family(base: PartitionedHamiltonian) -> Callable[[float], PartitionedHamiltonian]:
    """Family ``value -> base`` with the coupling block scaled by ``value``."""
    return lambda value: base.with_coupling(value * base.A)


def _row(param: float, part: PartitionedHamiltonian, interval, tol: float) -> PhaseDiagramRow:
    report = detect_breaking(part, interval, tol)
    energies = report.energies
    spec = direct_spectrum(assemble_full(part, original=True))
    P = block_parity(part)
    norms = []
    used = set()
    for e in energies:
        dist = np.abs(spec.eigenvalues - e)
        dist[list(used)] = np.inf
        k = int(np.argmin(dist))
        used.add(k)
        v = spec.vectors[:, k]
        norms.append(float(np.vdot(v, P @ v).real / np.vdot(v, v).real))
    return PhaseDiagramRow(float(param), energies, np.asarray(norms),
                           2 * report.missing_pairs, report.boundary_flag)


def sweep(family: Callable[[float], PartitionedHamiltonian], grid: Sequence[float],
          interval: Sequence[float] | None = None, tol: float = DEFAULT_TOL) -> list[PhaseDiagramRow]:
    """
    Breaking analysis over a monotone parameter grid.

    Each row holds the energies, the unit-vector self pseudo-norms
    ``<psi|P|psi>/<psi|psi>`` in the PT (original) representation and the
    number of non-real levels.  A failing row records its error and the
    sweep continues.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("sweep grid is empty")
    steps = np.diff(grid)
    if grid.size > 1 and not (np.all(steps > 0) or np.all(steps < 0)):
        raise ValueError("sweep grid must be strictly monotone")
    rows = []
    for value in grid:
        try:
            rows.append(_row(value, family(float(value)), interval, tol))
        except Exception as exc:  # recorded per row by contract
            rows.append(PhaseDiagramRow(float(value), np.zeros(0, complex), np.zeros(0), -1,
                                        error=f"{type(exc).__name__}: {exc}"))
    return rows


def phase_boundary(rows: Sequence[PhaseDiagramRow]) -> tuple[float, float] | None:
    """First grid cell in which the broken count increases, or ``None``."""
    good = [r for r in rows if r.error is None]
    for prev, cur in zip(good[:-1], good[1:]):
        if cur.broken_count > prev.broken_count:
            return prev.param, cur.param
    return None
