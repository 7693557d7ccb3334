"""Radial meshes, complex grid fields, and ball integral functionals.

Everything radial lives on a uniform node set r_0 < r_1 < ... < r_{n-1}
spanning a ball (r_inner = 0) or an annulus.  Integrals over the ball of
radius rho carry the surface factor omega_{N-1} r^(N-1) and use the composite
trapezoid rule; rho is snapped to the nearest node, so all ball functionals
are node-indexed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def sphere_area(dim_N: int) -> float:
    """Surface measure of the unit sphere in R^N (equals 2 when N=1)."""
    return 2.0 * math.pi ** (dim_N / 2.0) / math.gamma(dim_N / 2.0)


@dataclass(frozen=True)
class RadialDomain:
    """Ball or annulus described by its radii."""

    dim_N: int
    r_inner: float
    r_outer: float

    def __post_init__(self):
        if int(self.dim_N) != self.dim_N or self.dim_N < 1:
            raise ValueError(f"dim_N must be an integer >= 1, got {self.dim_N}")
        if not (math.isfinite(self.r_inner) and math.isfinite(self.r_outer)):
            raise ValueError("radii must be finite")
        if self.r_inner < 0.0:
            raise ValueError(f"r_inner must be >= 0, got {self.r_inner}")
        if self.r_outer <= self.r_inner:
            raise ValueError(
                f"degenerate domain: r_outer={self.r_outer} <= r_inner={self.r_inner}")

    @property
    def kind(self) -> str:
        return "ball" if self.r_inner == 0.0 else "annulus"


@dataclass(frozen=True)
class RadialMesh:
    """Uniform node set over a radial domain, endpoints included."""

    domain: RadialDomain
    nodes: np.ndarray
    h: float

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def dim_N(self) -> int:
        return self.domain.dim_N

    def node_index(self, rho: float) -> int:
        """Index of the node nearest to rho; rho must lie in the domain."""
        lo, hi = self.domain.r_inner, self.domain.r_outer
        pad = 1e-9 * (hi - lo)
        if not (lo - pad <= rho <= hi + pad):
            raise ValueError(f"rho={rho} outside [{lo}, {hi}]")
        j = int(round((rho - lo) / self.h))
        return min(max(j, 0), self.n - 1)


def build_mesh(domain: RadialDomain, n_nodes: int) -> RadialMesh:
    """Uniform mesh with n_nodes nodes including both endpoints."""
    if n_nodes < 16:
        raise ValueError(f"need at least 16 nodes, got {n_nodes}")
    nodes = np.linspace(domain.r_inner, domain.r_outer, n_nodes)
    h = (domain.r_outer - domain.r_inner) / (n_nodes - 1)
    return RadialMesh(domain=domain, nodes=nodes, h=h)


@dataclass
class GridField:
    """Complex-valued radial grid function."""

    mesh: RadialMesh
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (self.mesh.n,):
            raise ValueError(
                f"field length {vals.shape} does not match mesh with {self.mesh.n} nodes")
        if not (np.all(np.isfinite(vals.real)) and np.all(np.isfinite(vals.imag))):
            raise ValueError("field values must be finite")
        self.values = vals

    def copy(self) -> "GridField":
        return GridField(self.mesh, self.values.copy())


def zero_field(mesh: RadialMesh) -> GridField:
    return GridField(mesh, np.zeros(mesh.n, dtype=np.complex128))


def field_from_function(mesh: RadialMesh, fn) -> GridField:
    vals = np.asarray([fn(r) for r in mesh.nodes], dtype=np.complex128)
    return GridField(mesh, vals)


def same_mesh(f: GridField, g: GridField) -> bool:
    return f.mesh is g.mesh or (
        f.mesh.domain == g.mesh.domain and f.mesh.n == g.mesh.n)


def _require_same_mesh(f: GridField, g: GridField):
    if not same_mesh(f, g):
        raise ValueError("fields live on different meshes")


def ball_weights(mesh: RadialMesh, k: int) -> np.ndarray:
    """Trapezoid quadrature weights on nodes 0..k with the surface factor."""
    r = mesh.nodes[: k + 1]
    if k == 0:
        return np.zeros(1)
    w = np.full(k + 1, mesh.h)
    w[0] = w[-1] = 0.5 * mesh.h
    return w * sphere_area(mesh.dim_N) * r ** (mesh.dim_N - 1)


def radial_derivative(field: GridField) -> np.ndarray:
    """Nodal du/dr: centered in the interior, second-order one-sided at the
    ends, and exactly 0 at r=0 on a ball (even symmetry)."""
    u = field.values
    h = field.mesh.h
    du = np.empty_like(u)
    du[1:-1] = (u[2:] - u[:-2]) / (2.0 * h)
    if field.mesh.domain.kind == "ball":
        du[0] = 0.0
    else:
        du[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h)
    du[-1] = (3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * h)
    return du


def lp_ball_norm(field: GridField, p: float, rho: float) -> float:
    """L^p norm of the field over the ball (or annulus shell) of radius rho.

    p may be math.inf, in which case the max of |u| over nodes up to rho is
    returned.  rho is snapped to the nearest node.
    """
    k = field.mesh.node_index(rho)
    mod = np.abs(field.values[: k + 1])
    if p == math.inf:
        return float(mod.max())
    p = float(p)
    if p < 1.0:
        raise ValueError(f"p must be in [1, inf], got {p}")
    w = ball_weights(field.mesh, k)
    return float(np.sum(w * mod ** p) ** (1.0 / p))


def grad_l2_ball(field: GridField, rho: float) -> float:
    """Squared L^2 norm of the radial gradient over the ball of radius rho."""
    k = field.mesh.node_index(rho)
    du = radial_derivative(field)
    w = ball_weights(field.mesh, k)
    return float(np.sum(w * np.abs(du[: k + 1]) ** 2))


def boundary_flux_I(field: GridField, rho: float, allow_onesided: bool = False) -> float:
    """Boundary functional |omega_{N-1} rho^(N-1) * conj(u) * u'(rho)|.

    rho must snap to an interior node where the centered stencil exists.  At
    a mesh endpoint the centered stencil is unavailable: if the field value
    there is exactly zero the flux is zero and is returned without any
    stencil; otherwise a one-sided stencil is only used when explicitly
    requested via allow_onesided.
    """
    mesh = field.mesh
    k = mesh.node_index(rho)
    if k == 0 or k == mesh.n - 1:
        if abs(field.values[k]) == 0.0:
            return 0.0
        if mesh.domain.kind == "ball" and k == 0:
            # u'(0) = 0 by symmetry; for N >= 2 the surface factor vanishes too
            return 0.0
        if not allow_onesided:
            raise ValueError(
                f"rho={rho} snaps to a mesh endpoint; centered stencil unavailable "
                "(pass allow_onesided=True to use a one-sided one)")
    du = radial_derivative(field)
    r = mesh.nodes[k]
    area = sphere_area(mesh.dim_N) * r ** (mesh.dim_N - 1)
    return float(area * abs(field.values[k]) * abs(du[k]))


def source_term_J(u: GridField, source: GridField, rho: float) -> float:
    """Integral of |F||u| over the ball of radius rho."""
    _require_same_mesh(u, source)
    k = u.mesh.node_index(rho)
    w = ball_weights(u.mesh, k)
    return float(np.sum(w * np.abs(source.values[: k + 1]) * np.abs(u.values[: k + 1])))
