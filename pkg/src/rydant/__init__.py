"""rydant: dressed-level, spectrum, cell and pattern tools for a
Rydberg-atom RF antenna with polarization-independent response."""

from .angular import (
    AngularMomentum,
    Orientation,
    SphericalPolarization,
    clebsch_gordan,
    decompose_polarization,
)
from .cellfield import (
    CellGeometry,
    FieldProfile,
    angle_sweep_deviation,
    path_average,
    transfer_matrix_field,
)
from .hamiltonian import (
    EigenSpectrum,
    HermitianMatrix,
    RfDrive,
    TransitionSystem,
    assemble_hamiltonian,
    build_interaction_general,
    build_interaction_paper,
    eigen_closed_form,
    eigen_hermitian,
)
from .metrology import (
    FieldEstimate,
    GainSample,
    SplittingResult,
    branch_splittings,
    field_from_splitting,
    isotropic_deviation,
    normalized_gain,
    splitting_from_eigen,
)
from .patterns import (
    GainPattern,
    PatternComparison,
    SweepPlan,
    compare_patterns,
    dipole_reference,
    plane_to_orientation,
    run_sweep,
)
from .spectra import (
    LadderConfig,
    SpectrumTrace,
    SteadyStateError,
    UnresolvedSplittingError,
    extract_splitting,
    scan_spectrum,
    steady_state,
    steady_state_rho,
)

__version__ = "0.1.0"

__all__ = [
    "AngularMomentum",
    "CellGeometry",
    "EigenSpectrum",
    "FieldEstimate",
    "FieldProfile",
    "GainPattern",
    "GainSample",
    "HermitianMatrix",
    "LadderConfig",
    "Orientation",
    "PatternComparison",
    "RfDrive",
    "SpectrumTrace",
    "SphericalPolarization",
    "SplittingResult",
    "SteadyStateError",
    "SweepPlan",
    "TransitionSystem",
    "UnresolvedSplittingError",
    "angle_sweep_deviation",
    "assemble_hamiltonian",
    "branch_splittings",
    "build_interaction_general",
    "build_interaction_paper",
    "clebsch_gordan",
    "compare_patterns",
    "decompose_polarization",
    "dipole_reference",
    "eigen_closed_form",
    "eigen_hermitian",
    "extract_splitting",
    "field_from_splitting",
    "isotropic_deviation",
    "normalized_gain",
    "path_average",
    "plane_to_orientation",
    "run_sweep",
    "scan_spectrum",
    "splitting_from_eigen",
    "steady_state",
    "steady_state_rho",
    "transfer_matrix_field",
]
