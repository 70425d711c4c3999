"""
Spontaneous PT-symmetry breaking seen from the root count.

Sweeps the toy coupling through its exceptional point and the imaginary
cubic coupling of a small quartic model, printing the number of non-real
levels and the self pseudo-norm of the merging pair.

Run with ``python3 demos/breaking_sweep.py``.
"""

import numpy as np

from ptfesh import ModelSpec, coupling_family, model_family, phase_boundary, sweep, two_level


def toy_sweep():
    rows = sweep(coupling_family(two_level(1.0)), np.linspace(0.30, 0.60, 31))
    print("toy sweep: omega, broken count, smallest |<psi|P|psi>|")
    for r in rows[14:24]:
        print(f"  {r.param:.2f}  {r.broken_count}  {np.min(np.abs(r.self_pseudo_norms)):.6f}")
    print(f"  transition bracket: {phase_boundary(rows)}")


def cubic_sweep():
    rows = sweep(model_family(ModelSpec(0.0, 1.0), "f_im", 8), np.linspace(1.0, 1.7, 8))
    print("\nquartic dim 8, f = i*f_im: pseudo-norms of levels 2 and 3")
    for r in rows:
        a, b = r.self_pseudo_norms[2:4]
        print(f"  {r.param:.1f}  broken {r.broken_count}  {a:+.4f} {b:+.4f}")


if __name__ == "__main__":
    toy_sweep()
    cubic_sweep()
