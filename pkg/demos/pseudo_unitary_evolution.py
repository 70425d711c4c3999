"""
Conserved indefinite norm under non-Hermitian time evolution.

For an unbroken and a broken PT model the Euclidean norm of the evolved
state changes while ``<psi(t)|P|psi(t)>`` stays at its initial value.

Run with ``python3 demos/pseudo_unitary_evolution.py``.
"""

import numpy as np

from ptfesh import (
    ModelSpec,
    assemble_full,
    build_model,
    build_parity,
    direct_spectrum,
    pseudo_normalize,
    trace_conservation,
    two_level,
)

TIMES = np.linspace(0.0, 10.0, 200)


def report(label, H, P):
    spec = pseudo_normalize(direct_spectrum(H), P)
    psi0 = np.zeros(H.shape[0], dtype=complex)
    psi0[0] = 1.0
    trace = trace_conservation(spec, P, psi0, TIMES)
    print(f"{label}")
    print(f"  pseudo-norm drift     {trace.max_pseudo_norm_drift:.2e}")
    print(f"  |psi| at t = 0, 5, 10 {trace.euclidean_norms[0]:.4f} "
          f"{trace.euclidean_norms[100]:.4f} {trace.euclidean_norms[-1]:.4f}")


if __name__ == "__main__":
    dim = 20
    report("unbroken: p^2 + x^2 + 0.2i x^3 + x^4",
           build_model(ModelSpec(0.2j, 1.0), dim).matrix, build_parity(dim).matrix)
    report("broken: 2x2 toy at omega = 0.6",
           assemble_full(two_level(0.6), original=True), np.diag([1.0, -1.0]))
