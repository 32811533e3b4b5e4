"""qcloner: simulator and training harness for a learned linear-optical
phase-covariant quantum cloner.

The package simulates a four-mode polarization-dependent beam splitter
exactly (permanent-based two-photon amplitudes), measures clone fidelities
through post-selected coincidence projections, and trains the gate angles
with a from-scratch Nelder-Mead loop fed by randomly drawn equatorial
signal states.
"""

__version__ = "0.1.0"

from .cloner import (
    CoincidenceCounts,
    EmptySampleError,
    FidelityPair,
    PostSelectionError,
    coincidence_probabilities,
    estimate_fidelities,
    exact_fidelities,
    fidelities_via_density_matrix,
    sample_counts,
)
from .fock import (
    FockConfig,
    ModeLabel,
    PhotonConservationError,
    amplitude_submatrix,
    enumerate_fock_configs,
    permanent,
    transition_amplitude,
)
from .model import (
    OPTIMAL_FIDELITY,
    LearningTrace,
    PhaseCovariantCloner,
    ScanResult,
    cost,
    evaluate_test_set,
    scan_landscape,
)
from .neldermead import MinimizeResult, OptimizerConfig, Simplex, StepKind
from .optics import (
    GateParams,
    PolarizationQubit,
    TwoPhotonState,
    build_scattering_matrix,
    evolve,
    prepare_input,
    splitting_ratios,
)

__all__ = [
    "CoincidenceCounts",
    "EmptySampleError",
    "FidelityPair",
    "FockConfig",
    "GateParams",
    "LearningTrace",
    "MinimizeResult",
    "ModeLabel",
    "OPTIMAL_FIDELITY",
    "OptimizerConfig",
    "PhaseCovariantCloner",
    "PhotonConservationError",
    "PolarizationQubit",
    "PostSelectionError",
    "ScanResult",
    "Simplex",
    "StepKind",
    "TwoPhotonState",
    "amplitude_submatrix",
    "build_scattering_matrix",
    "coincidence_probabilities",
    "cost",
    "enumerate_fock_configs",
    "estimate_fidelities",
    "evaluate_test_set",
    "evolve",
    "exact_fidelities",
    "fidelities_via_density_matrix",
    "permanent",
    "prepare_input",
    "sample_counts",
    "scan_landscape",
    "splitting_ratios",
    "transition_amplitude",
]
