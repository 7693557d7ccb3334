"""Shared solved instances.

The expensive nonlinear solves are session-scoped so the unit suites and the
acceptance suite reuse the same fields.
"""

import numpy as np
import pytest

from deadcore import RadialDomain, SolverOptions, build_mesh, build_source
from deadcore.mesh import GridField
from deadcore.solver import fixed_point_solve, make_problem, newton_solve


def plateau_problem(a, b, height, n_nodes=257, m=0.5, r1=0.3, r_outer=2.0):
    mesh = build_mesh(RadialDomain(1, 0.0, r_outer), n_nodes)
    F = build_source(mesh, "plateau", {"r0": 0.0, "r1": r1, "height": height})
    return make_problem(a, b, m, F)


def ring_problem(height, n_nodes=257, center=1.2, width=0.2):
    mesh = build_mesh(RadialDomain(1, 0.0, 2.0), n_nodes)
    F = build_source(mesh, "ring", {"center": center, "width": width,
                                    "height": height})
    return make_problem(1.0, 1j, 0.5, F)


def manufactured_case(n_nodes):
    """Exact solution u*(r) = (1-r^2)^2 on the unit interval, a = b = 1.

    The source is assembled from the continuous operator, so the discrete
    solve recovers u* up to the O(h^2) stencil error.
    """
    mesh = build_mesh(RadialDomain(1, 0.0, 1.0), n_nodes)
    r = mesh.nodes
    ustar = ((1.0 - r ** 2) ** 2).astype(complex)
    sing = np.zeros_like(ustar)
    nz = np.abs(ustar) > 0.0
    sing[nz] = np.abs(ustar[nz]) ** (-0.5) * ustar[nz]
    F = -1j * (12.0 * r ** 2 - 4.0) + sing + ustar
    problem = make_problem(1.0, 1.0, 0.5, GridField(mesh, F))
    return problem, GridField(mesh, ustar)


@pytest.fixture(scope="session")
def solver_opts():
    return SolverOptions(tol=1e-9, max_iter=20000)


@pytest.fixture(scope="session")
def dead_core_run(solver_opts):
    problem = plateau_problem(1.0, 1j, 0.1)
    result = newton_solve(problem, solver_opts)
    assert result.converged
    return problem, result


@pytest.fixture(scope="session")
def dead_core_run_fine(solver_opts):
    problem = plateau_problem(1.0, 1j, 0.1, n_nodes=513)
    result = newton_solve(problem, solver_opts)
    assert result.converged
    return problem, result


@pytest.fixture(scope="session")
def linear_contrast_run(solver_opts):
    problem = plateau_problem(0.0, 1.0 + 1j, 0.1)
    result = fixed_point_solve(problem, solver_opts)
    assert result.converged
    return problem, result


@pytest.fixture(scope="session")
def ring_family(solver_opts):
    runs = []
    for height in (0.025, 0.05, 0.1):
        problem = ring_problem(height)
        result = newton_solve(problem, solver_opts)
        assert result.converged
        runs.append((problem, result))
    return runs


@pytest.fixture(scope="session")
def moderate_run(solver_opts):
    # real coefficient pair used by the dependence estimates
    problem = plateau_problem(1.0, 1.0, 0.5)
    result = newton_solve(problem, solver_opts)
    assert result.converged
    return problem, result


@pytest.fixture(scope="session")
def manufactured_runs(solver_opts):
    runs = {}
    for n in (65, 129, 257):
        problem, exact = manufactured_case(n)
        result = fixed_point_solve(problem, solver_opts)
        assert result.converged
        runs[n] = (problem, exact, result)
    return runs
