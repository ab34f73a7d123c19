"""degenspin: exact diagonalization and entanglement statistics for
spin-1/2 systems with (nearly) degenerate ground states.

The package covers the full pipeline: lattice geometry, matrix-free
Hamiltonians (transverse-field Ising chains; Heisenberg +
Dzyaloshinskii-Moriya supercells), a degeneracy-safe blocked eigensolver,
Haar-random superpositions within a degenerate multiplet, von Neumann
entropy distributions, multi-spin correlators and scalar chirality, and a
single-shot measurement protocol.  The `sweep` command line drives magnetic
field sweeps end to end.
"""

__version__ = "0.1.0"

from .lattice import (
    LatticeGeometry,
    build_chain,
    build_triangular_supercell,
    geometric_half_sites,
    geometry_from_json,
    geometry_to_json,
)
from .hamiltonian import HamiltonianTerms, apply, build_dmi, build_ising, expectation
from .eigensolver import (
    ConvergenceError,
    EigenSolution,
    Multiplet,
    dense_matrix,
    dense_spectrum,
    group_multiplets,
    lowest_eigenpairs,
    refine_degenerate_block,
)
from .ensemble import (
    CoefficientVector,
    EnsembleSpec,
    closed_form_ising_entropy,
    coefficient_samples,
    sample_coefficients,
    sample_rng,
    superpose,
)
from .entanglement import (
    BipartitionMask,
    EntropyStatistics,
    SchmidtSpectrum,
    SubspaceEntropySampler,
    entropy_distribution,
    entropy_statistics,
    half_chain_mask,
    reduced_spectrum,
    von_neumann_entropy,
)
from .observables import (
    DiagonalCorrelators,
    ObservableReport,
    degenerate_average,
    local_magnetization,
    scalar_chirality,
    ursell2,
    ursell3,
)
from .measurement import (
    MeasurementRecord,
    MeasurementTally,
    estimate_magnetization,
    rotate_basis,
    sample_bitstring,
    single_shot_protocol,
)
from .sweep_cli import SweepConfig, run_sweep, validate_config
