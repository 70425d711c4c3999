"""
ptfesh: Feshbach (Schur-complement) reduction for Hermitian and PT-symmetric
anharmonic oscillators.

The even-parity sector is kept as a model space; eliminating the odd sector
leaves a Hermitian, energy-dependent effective Hamiltonian whose
self-consistent roots are the real levels of the full problem.  Missing
roots signal spontaneous PT-symmetry breaking.  The indefinite parity
product supplies quasi-parities, spectral reconstructions and a conserved
quantity for time evolution.
"""

from .evolve import EvolutionTrace, evolve_state, evolve_states, trace_conservation
from .exceptions import (
    ConfigError,
    ContractError,
    CoverageError,
    DegeneracyError,
    DegenerateIntervalError,
    OracleFailure,
    PhaseUndefinedError,
    PoleProximityError,
    RootCountError,
    StructureError,
)
from .feshbach import (
    branch_values,
    decoupled_poles,
    effective_hamiltonian,
    linearized_spectrum,
    reconstruct_eliminated,
)
from .hobasis import (
    BasisSpec,
    ModelSpec,
    OperatorMatrix,
    build_kinetic_plus_quadratic,
    build_model,
    build_parity,
    build_position_power,
)
from .oracle import SpikedSpec, direct_spectrum, spiked_oscillator_levels
from .partitioning import (
    PartitionedHamiltonian,
    assemble_full,
    block_parity,
    normalize_pt_phase,
    parity_partition,
    two_level,
    validate_pt_structure,
)
from .pseudometric import (
    SpectralData,
    assign_quasi_parity,
    pseudo_gram,
    pseudo_inner,
    pseudo_normalize,
    reconstruct_hamiltonian,
    reconstruct_identity,
)
from .selfconsist import (
    BreakingReport,
    PhaseDiagramRow,
    SelfConsistentRoot,
    coupling_family,
    detect_breaking,
    model_family,
    phase_boundary,
    solve_selfconsistent,
    sweep,
)

__version__ = "0.1.0"
