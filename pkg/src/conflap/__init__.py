"""Conformal fractional Laplacians on model geometries.

Numerical routines for the fractional conformal operator and its curvature on
the round sphere, the flat cylinder and Euclidean space, the Caffarelli-
Silvestre extension realization, and the periodic (Delaunay) solutions of the
constant-curvature equation on the cylinder.
"""

from .cylinder import (
    calibrate_kernel,
    cyl_curvature,
    cyl_kernel,
    cyl_symbol,
    kernel_base,
    kernel_multiplier,
    periodized_kernel,
    theta0,
)
from .delaunay import (
    DelaunaySolution,
    PeriodicGridFunction,
    apply_Ls_periodic,
    asymptotic_profile,
    bifurcation_period,
    bubble_tower_defect,
    continue_branch,
    delaunay_residual,
    functional_FL,
    kernel_functional_FL,
    limit_amplitude,
    solve_delaunay,
)
from .errors import (
    ConflapError,
    NewtonDivergenceError,
    NonConvergenceError,
    ParameterError,
    SingularityError,
    SupportError,
    TaperError,
)
from .euclidean import (
    Bubble,
    LineGridFunction,
    bubble_eval,
    calibrate_integral_constant,
    commutator_check,
    cosine_taper,
    covariance_bridge,
    frac_lap_integral,
    frac_lap_spectral,
    line_quotient,
)
from .extension import (
    ExtensionSolution,
    d_s_const,
    d_star_const,
    energy_of_extension,
    solve_extension_mode,
    weighted_volume_coefficient,
)
from .params import FracParams, KernelSpec
from .specfun import gamma_abs2, hyp2f1, log_gamma, log_gamma_abs2, signed_gamma
from .sphere import (
    ModeSpectrum,
    apply_sphere,
    apply_sphere_grid,
    calibrate_sphere_kernel,
    conformal_laplacian_eigenvalue,
    factored_symbol,
    gjms_symbol,
    mode_eigenvalue,
    singular_integral_apply,
    sphere_curvature,
    sphere_kernel,
    sphere_symbol,
    vol_sphere,
    yamabe_quotient_sphere,
)

__version__ = "0.1.0"

__all__ = [
    "Bubble",
    "ConflapError",
    "DelaunaySolution",
    "ExtensionSolution",
    "FracParams",
    "KernelSpec",
    "LineGridFunction",
    "ModeSpectrum",
    "NewtonDivergenceError",
    "NonConvergenceError",
    "ParameterError",
    "PeriodicGridFunction",
    "SingularityError",
    "SupportError",
    "TaperError",
    "apply_Ls_periodic",
    "apply_sphere",
    "apply_sphere_grid",
    "asymptotic_profile",
    "bifurcation_period",
    "bubble_eval",
    "bubble_tower_defect",
    "calibrate_integral_constant",
    "calibrate_kernel",
    "calibrate_sphere_kernel",
    "commutator_check",
    "conformal_laplacian_eigenvalue",
    "continue_branch",
    "cosine_taper",
    "covariance_bridge",
    "cyl_curvature",
    "cyl_kernel",
    "cyl_symbol",
    "d_s_const",
    "d_star_const",
    "delaunay_residual",
    "energy_of_extension",
    "factored_symbol",
    "frac_lap_integral",
    "frac_lap_spectral",
    "functional_FL",
    "gamma_abs2",
    "gjms_symbol",
    "hyp2f1",
    "kernel_base",
    "kernel_functional_FL",
    "kernel_multiplier",
    "limit_amplitude",
    "line_quotient",
    "log_gamma",
    "log_gamma_abs2",
    "mode_eigenvalue",
    "periodized_kernel",
    "singular_integral_apply",
    "solve_delaunay",
    "solve_extension_mode",
    "sphere_curvature",
    "sphere_kernel",
    "sphere_symbol",
    "theta0",
    "vol_sphere",
    "weighted_volume_coefficient",
    "yamabe_quotient_sphere",
]
