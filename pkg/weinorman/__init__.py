"""Wei-Norman product-of-exponentials toolkit for SU(N)."""

from .adjoint_exponential import (
    AdjointExponentialTable,
    BetaSet,
    Spectrum,
    beta_coefficients,
    beta_from_recurrence,
    characteristic_polynomial,
    exp_adjoint,
    exp_adjoint_product,
    spectrum,
)
from .algebra_core import (
    LieBasis,
    StructureTensor,
    adjoint_action,
    adjoint_generator,
    builtin_basis,
    compute_structure_tensor,
    jacobi_residual,
)
from .config import RunConfig, Settings, get_settings
from .errors import (
    BasisValidationError,
    BetaSolveError,
    ChartOriginError,
    ChartSingularityError,
    ClosureError,
    ControlSignalError,
    GoldenSuiteFailure,
    SpectrumError,
    UnsupportedBasisError,
    WeiNormanError,
)
from .propagation import (
    ControlSignal,
    Trajectory,
    integrate_gamma,
    reconstruct_unitary,
    reference_propagator,
    verify_equivalence,
)
from .wei_norman import ChartSequence, WeiNormanContext, chart_coordinates, wei_norman_rhs, xi_matrix

__all__ = [
    "AdjointExponentialTable",
    "BasisValidationError",
    "BetaSet",
    "BetaSolveError",
    "ChartOriginError",
    "ChartSequence",
    "ChartSingularityError",
    "ClosureError",
    "ControlSignal",
    "ControlSignalError",
    "GoldenSuiteFailure",
    "LieBasis",
    "RunConfig",
    "Settings",
    "Spectrum",
    "SpectrumError",
    "StructureTensor",
    "Trajectory",
    "UnsupportedBasisError",
    "WeiNormanContext",
    "WeiNormanError",
    "adjoint_action",
    "adjoint_generator",
    "beta_coefficients",
    "beta_from_recurrence",
    "builtin_basis",
    "characteristic_polynomial",
    "chart_coordinates",
    "compute_structure_tensor",
    "exp_adjoint",
    "exp_adjoint_product",
    "get_settings",
    "integrate_gamma",
    "jacobi_residual",
    "reconstruct_unitary",
    "reference_propagator",
    "spectrum",
    "verify_equivalence",
    "wei_norman_rhs",
    "xi_matrix",
]
