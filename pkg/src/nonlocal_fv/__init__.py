"""Finite-volume solver for nonlocal scalar conservation laws on an interval.

The scheme is a boundary-aware Lax-Friedrichs method for

    d/dt rho + d/dx f(t, x, rho, J rho) = 0   on ]a, b[,

where (J rho)(x) is a window-normalized convolution of rho against a smooth
kernel, with prescribed boundary data rho_a(t), rho_b(t) entering through
ghost cells. Alongside the solver the package computes every constant appearing in
the scheme's a-priori estimates (L1, L-infinity, total variation, time
Lipschitz, entropy, and data stability) and checks the discrete solution
against them at runtime.
"""

from .bounds import (
    ConstantsReport,
    DataDistances,
    DataNorms,
    StabilityReport,
    apriori_constants,
    build_data_distances,
    build_data_norms,
    kernel_curvature,
    kernel_lipschitz,
    stability_constants,
)
from .config import FluxConfig, KernelConfig, RunConfig, make_datafn, parse_config
from .diagnostics import (
    DiagnosticsRecord,
    MeasuredNorms,
    compare_bounds,
    entropy_k_grid,
    entropy_residuals,
    mass_balance_residual,
    measure,
    time_difference,
)
from .driver import RunSetup, Trajectory, assemble, solve
from .errors import (
    AdmissibilityError,
    BoundViolation,
    CFLViolation,
    ConfigError,
    ConfigSemantic,
    ConfigSyntax,
    DegenerateSupport,
    InvalidCellCount,
    InvalidDomain,
    InvalidMesh,
    NegativeDatum,
    NonFiniteState,
    NonFiniteValue,
    NonPositiveWindow,
    NumericError,
    SolverError,
)
from .experiments import (
    ConvergenceResult,
    Perturbation,
    StabilityResult,
    convergence_study,
    solver_threads,
    stability_experiment,
)
from .fluxes import (
    Box,
    FluxBounds,
    FluxModel,
    check_flux_contract,
    evaluate_flux,
    flux_bounds,
    linear_advection,
    nonlocal_lwr,
    zero_flux,
)
from .grid import (
    DataFn,
    Mesh,
    ProblemData,
    ProjectedData,
    build_mesh,
    cfl_cap,
    constant_data,
    project_all,
    project_boundary,
    project_initial,
    sine_data,
    step_data,
    table_data,
)
from .kernels import (
    DiscreteKernel,
    KernelNorms,
    KernelSpec,
    build_discrete_kernel,
    kernel_norms,
    lookahead,
    nonlocal_average,
    triweight,
)
from .solver import SolverState, advance, make_state, numerical_flux, step

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # driver
    "RunSetup", "Trajectory", "assemble", "solve",
    # config
    "RunConfig", "KernelConfig", "FluxConfig", "parse_config", "make_datafn",
    # kernels
    "KernelSpec", "KernelNorms", "DiscreteKernel", "triweight", "lookahead",
    "kernel_norms", "build_discrete_kernel", "nonlocal_average",
    # fluxes
    "FluxModel", "FluxBounds", "Box", "nonlocal_lwr", "linear_advection",
    "zero_flux", "evaluate_flux", "flux_bounds", "check_flux_contract",
    # grid and data
    "Mesh", "build_mesh", "cfl_cap", "DataFn", "ProblemData", "ProjectedData",
    "constant_data", "step_data", "sine_data", "table_data",
    "project_initial", "project_boundary", "project_all",
    # solver core
    "SolverState", "make_state", "numerical_flux", "advance", "step",
    # diagnostics
    "MeasuredNorms", "DiagnosticsRecord", "measure", "time_difference",
    "mass_balance_residual", "entropy_k_grid", "entropy_residuals",
    "compare_bounds",
    # bounds
    "DataNorms", "DataDistances", "ConstantsReport", "StabilityReport",
    "build_data_norms", "build_data_distances", "apriori_constants",
    "stability_constants", "kernel_lipschitz", "kernel_curvature",
    # experiments
    "ConvergenceResult", "StabilityResult", "Perturbation",
    "convergence_study", "stability_experiment", "solver_threads",
    # errors
    "SolverError", "ConfigError", "ConfigSyntax", "ConfigSemantic",
    "NegativeDatum", "AdmissibilityError", "InvalidDomain", "InvalidCellCount",
    "InvalidMesh", "CFLViolation", "DegenerateSupport", "NonPositiveWindow",
    "NumericError", "NonFiniteValue", "NonFiniteState", "BoundViolation",
]
