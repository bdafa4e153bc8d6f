"""Two-species competition with nonlocal dispersal on 1-D grids.

Library layout:

  grid, kernels, operators   discretization and dispersal assembly
  spectral                   spectral bounds (dense / power / rayleigh)
  single_species             logistic dichotomy and steady states
  competition                co-stepping simulator and order diagnostics
  classifier                 exponent-based global-dynamics classification
  config, runner, cli        scenario files, report path, command line
"""

from .competition import (
    AttractorRefs,
    ModelParams,
    SimulationOutcome,
    comparison_check,
    energy_residual,
    monotone_bracket,
    order_fractions,
    simulate,
    symmetrization_gap,
)
from .classifier import (
    ClassificationOutcome,
    StabilityExponents,
    classify,
    continuum_check,
    nonexistence_probe,
    solve_semitrivials,
    stability_exponents,
    verify_prediction,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    HypothesisViolation,
    MonotonicityError,
    NumericsError,
    UnsupportedRegime,
)
from .grid import SpatialGrid, build_grid
from .kernels import KernelSpec, cosine_bump, gaussian, tophat
from .operators import (
    BoundaryRegime,
    DispersalOperator,
    apply_operator,
    assemble_dispersal,
    assemble_laplacian,
)
from .single_species import (
    SingleSpeciesProblem,
    SteadyStateResult,
    lambda_star,
    solve_steady_state,
    time_march,
)
from .spectral import SpectralReport, rayleigh_quotient, spectral_bound

__version__ = "0.1.0"

__all__ = [
    "AttractorRefs",
    "BoundaryRegime",
    "ClassificationOutcome",
    "ConfigError",
    "ConvergenceError",
    "DispersalOperator",
    "HypothesisViolation",
    "KernelSpec",
    "ModelParams",
    "MonotonicityError",
    "NumericsError",
    "SimulationOutcome",
    "SingleSpeciesProblem",
    "SpatialGrid",
    "SpectralReport",
    "StabilityExponents",
    "SteadyStateResult",
    "UnsupportedRegime",
    "apply_operator",
    "assemble_dispersal",
    "assemble_laplacian",
    "build_grid",
    "classify",
    "comparison_check",
    "continuum_check",
    "cosine_bump",
    "energy_residual",
    "gaussian",
    "lambda_star",
    "monotone_bracket",
    "nonexistence_probe",
    "order_fractions",
    "rayleigh_quotient",
    "simulate",
    "solve_semitrivials",
    "solve_steady_state",
    "spectral_bound",
    "stability_exponents",
    "symmetrization_gap",
    "time_march",
    "tophat",
    "verify_prediction",
]
