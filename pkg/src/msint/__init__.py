"""Structure-preserving integrators for abcd-Boussinesq systems on periodic domains."""

from .errors import (
    ConfigError,
    InsufficientDataError,
    MeasurementError,
    MsintError,
    ProfileSolveError,
    ReconstructionError,
    SingularOperatorError,
    StepFailureError,
    StructureError,
)
from .gridops import (
    CirculantOperator,
    GridSpec,
    anticommute_check,
    average,
    central_difference,
    forward_difference,
    helmholtz_solve,
    parity_singularity_report,
    reversal,
    spectral_derivative,
)
from .integrate import (
    RunResult,
    SchemeConfig,
    StepReport,
    TangentPair,
    box_step,
    imr_step_full,
    imr_step_reduced,
    run,
    tangent_step,
)
from .invariants import (
    DiagnosticsRecord,
    energy_E_h,
    frak_I_h,
    hamiltonian_H_h,
    linear_invariants,
    local_law_residuals,
    local_law_residuals_exact,
    momentum_I_h,
    total_symplecticity,
)
from .model import (
    ModelCoefficients,
    MSStructure,
    StructureClass,
    classify_structure,
    coefficients_from_generators,
    grad_S,
    ms_matrices,
    nonlinearity_A,
    nonlinearity_B,
    potential_S,
)
from .semidiscrete import (
    SemiDiscreteSystem,
    StateField,
    ZGridField,
    make_box_system,
    make_full_system,
    make_reduced_system,
    reconstruct_aux,
    residual_full,
    rhs_box,
    rhs_reduced,
)
from .dispersion import (
    box_conjugacy_check,
    continuous_omega,
    imr_time_map,
    imr_time_map_inverse,
    measure_frequency,
    spatial_wavenumber_map,
)
from .waves import (
    SolitaryWave,
    SolitaryWaveSpec,
    gaussian_field,
    plane_wave_field,
    solve_profile,
    standard_fields,
    symmetric_random_field,
    traveling_residual,
)

__version__ = "0.1.0"
