"""Radial solver and compact-support (dead core) verification toolkit for
the stationary Schrodinger equation with a singular modulus potential."""

__version__ = "0.1.0"

from .mesh import (GridField, RadialDomain, RadialMesh, boundary_flux_I,
                   build_mesh, field_from_function, grad_l2_ball,
                   lp_ball_norm, source_term_J, sphere_area, zero_field)
from .params import (ConstantPack, HypothesisError, ParamPair,
                     check_existence, check_uniqueness, classify_region,
                     combine_estimates, constants, in_set_A, in_set_B,
                     make_params)
from .solver import (RadialProblem, SolveResult, SolverOptions,
                     assemble_laplacian, check_apriori_bounds,
                     fixed_point_solve, make_problem, newton_solve, residual,
                     solve, solve_linear_poisson, standing_wave,
                     truncated_nonlinearity)
from .sources import build_source, support_outer_radius
from .support import (EnergyProfiles, ExponentPack, SupportReport, analyze,
                      audit_differential_inequality, calibrate_C,
                      energy_profiles, exponent_pack, localization_threshold,
                      numeric_support_radius, rho_max, smallness_checks,
                      vanishing_thresholds, zero_ball_radius)

__all__ = [
    "GridField", "RadialDomain", "RadialMesh", "boundary_flux_I",
    "build_mesh", "field_from_function", "grad_l2_ball", "lp_ball_norm",
    "source_term_J", "sphere_area", "zero_field",
    "ConstantPack", "HypothesisError", "ParamPair", "check_existence",
    "check_uniqueness", "classify_region", "combine_estimates", "constants",
    "in_set_A", "in_set_B", "make_params",
    "RadialProblem", "SolveResult", "SolverOptions", "assemble_laplacian",
    "check_apriori_bounds", "fixed_point_solve", "make_problem",
    "newton_solve", "residual", "solve", "solve_linear_poisson",
    "standing_wave", "truncated_nonlinearity",
    "build_source", "support_outer_radius",
    "EnergyProfiles", "ExponentPack", "SupportReport", "analyze",
    "audit_differential_inequality", "calibrate_C", "energy_profiles",
    "exponent_pack", "localization_threshold", "numeric_support_radius",
    "rho_max", "smallness_checks", "vanishing_thresholds",
    "zero_ball_radius",
]
