"""Wigner functions and free-rotor tomography on the discrete cylinder S^1 x Z."""
from .conventions import TIME_SIGN, AlphaConvention
from .errors import (
    AliasRisk,
    CylinderError,
    ExcessLeakage,
    ImaginaryResidue,
    MissingTomogram,
    NegativeDensity,
    NonconvergentTheta,
    OutOfTruncation,
    UnresolvableWedge,
)
from .numerics import (
    PeriodicGrid,
    angles_close,
    circle_integrate,
    dirichlet_delta,
    fourier_coefficient,
    reduce_angle,
    theta3,
)
from .phase_space import (
    CoefficientMap,
    WignerMap,
    coefficient_map,
    displacement_matrix,
    kernel_matrix,
    marginals,
    wigner_from_coefficients,
    wigner_map,
)
from .states import (
    PureState,
    TruncatedDensityMatrix,
    coherent_state,
    oam_eigenstate,
    superposition_state,
    validate,
    wedge_state,
)
from .tomography import (
    OamHistogram,
    Tomogram,
    TomogramSet,
    angular_distribution,
    free_evolve,
    reconstruct_coefficients,
    reconstruct_wigner,
    simulate_oam_histogram,
    simulate_tomogram_set,
)

__version__ = "0.1.0"
