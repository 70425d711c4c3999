"""
Self-consistent roots of the energy-dependent effective Hamiltonian.

Walks through the 2x2 toy (attraction for the PT sign, repulsion for the
Hermitian one) and then the quartic oscillator, comparing the roots with
direct diagonalization and printing quasi-parities.

Run with ``python3 demos/effective_hamiltonian.py``.
"""

import numpy as np

from ptfesh import (
    ModelSpec,
    build_model,
    build_parity,
    detect_breaking,
    direct_spectrum,
    linearized_spectrum,
    parity_partition,
    pseudo_normalize,
    solve_selfconsistent,
    two_level,
)


def toy():
    print("2x2 toy, F = 1, G = 2, coupling omega")
    print(f"{'omega':>6} {'alpha':>5}  roots")
    for omega in (0.1, 0.3, 0.49, 0.6):
        for alpha in (1, -1):
            report = detect_breaking(two_level(omega, alpha))
            shown = ", ".join(f"{e:.10g}" for e in report.energies)
            print(f"{omega:6.2f} {alpha:5d}  {shown}")
    # H_eff(rho) is a real number here; its graph crosses rho = E at the roots
    part = two_level(0.3, -1)
    for rho in (1.0, 1.5, 1.9):
        print(f"  H_eff({rho}) = {linearized_spectrum(part, rho)[0][0]:.6f}")


def quartic(dim=30):
    H = build_model(ModelSpec(0.2j, 1.0), dim).matrix
    P = build_parity(dim).matrix
    part = parity_partition(H, P)
    roots = solve_selfconsistent(part)
    spec = pseudo_normalize(direct_spectrum(H), P)
    print(f"\np^2 + x^2 + 0.2i x^3 + x^4, dim {dim}: lowest six levels")
    print(f"{'n':>3} {'root':>22} {'direct':>22} {'Q':>3}")
    for k, r in enumerate(roots[:6]):
        print(f"{k:3d} {r.energy:22.15f} {spec.eigenvalues[k].real:22.15f} {spec.quasi_parities[k]:3d}")


if __name__ == "__main__":
    toy()
    quartic()
