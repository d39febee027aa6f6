"""Simulated VQE pipeline for molecular ground states and potential energy surfaces."""

from .ansatz import AnsatzCircuit, HFReference, build_ansatz, prepare_state
from .chem import (
    ActiveSpaceSpec,
    DEFAULT_WATER_ACTIVE_SPACE,
    FcidumpError,
    FermionicHamiltonian,
    Geometry,
    ScanManifest,
    build_geometry,
    load_manifest,
    load_manifest_file,
    parse_fcidump,
    reduce_active_space,
    serialize_fcidump,
)
from .exact import ExactResult, ground_state, to_dense
from .jordan_wigner import jordan_wigner, total_number_operator
from .pauli import PauliOperatorSum, PauliTerm, pauli_multiply
from .pes import (
    PESRecord,
    SurfaceFit,
    SurfaceMinimum,
    emit_pes,
    fit_surface,
    minimize_surface,
    scan,
)
from .simulator import Gate, Statevector, apply_gate, expectation, probabilities, sample_counts
from .spsa import OptimizationTrace, SPSAConfig, calibrate, spsa_minimize
from .vqe import (
    ProbabilityDiagnostics,
    VQERun,
    WarmStartResult,
    diagnostics_from_state,
    vqe_energy,
    warm_start_search,
)

__version__ = "0.1.0"
