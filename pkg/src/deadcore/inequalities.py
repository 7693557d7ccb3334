"""Numerical checks of the scalar and functional inequalities the
dead-core estimates rest on: Young with parameter, Gagliardo-Nirenberg,
the sphere-trace interpolation bound, and the two pointwise properties of
the singular nonlinearity (monotonicity gap and Holder continuity).

Scalar checks are vectorized over numpy arrays.  Empirical constants are
estimated by seeded sampling with a 10 percent safety margin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .mesh import (GridField, RadialDomain, build_mesh, grad_l2_ball,
                   lp_ball_norm, sphere_area)


def check_young(x, y, eps, p):
    """Slack of x*y <= eps^p'/p' * x^p' + eps^-p/p * y^p (must be >= 0)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    eps = np.asarray(eps, dtype=float)
    p = np.asarray(p, dtype=float)
    if np.any(x < 0) or np.any(y < 0):
        raise ValueError("x and y must be nonnegative")
    if np.any(eps <= 0):
        raise ValueError("eps must be positive")
    if np.any(p <= 1):
        raise ValueError("p must exceed 1")
    pc = p / (p - 1.0)
    with np.errstate(over="ignore"):
        # grouped as powers of products: eps^pc * x^pc written separately
        # turns into inf * 0 = nan for tiny x and p near 1.  pc still blows
        # up as p -> 1; an overflowed term means infinite slack, which is a
        # valid (trivially true) outcome of the bound
        rhs = (eps * x) ** pc / pc + (y / eps) ** p / p
    return rhs - x * y


def _f_singular(z, m):
    """|z|^(m-1) z extended by 0 at the origin, elementwise."""
    z = np.asarray(z, dtype=complex)
    az = np.abs(z)
    out = np.zeros_like(z)
    nz = az > 0.0
    out[nz] = az[nz] ** (m - 1.0) * z[nz]
    return out


def monotonicity_gap(z1, z2, m):
    """Re((f(z1)-f(z2)) conj(z1-z2)) * (|z1|+|z2|)^(1-m) / |z1-z2|^2.

    The normalized gap is bounded below by a positive constant depending
    only on m; coincident pairs give +inf (nothing to check).
    """
    if not 0.0 < m < 1.0:
        raise ValueError(f"m must lie in (0, 1), got {m}")
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    diff = z1 - z2
    d2 = np.abs(diff) ** 2
    raw = np.real((_f_singular(z1, m) - _f_singular(z2, m)) * np.conj(diff))
    scale = (np.abs(z1) + np.abs(z2)) ** (1.0 - m)
    out = np.full(np.broadcast(z1, z2).shape, np.inf)
    ok = d2 > 0.0
    out[ok] = raw[ok] * scale[ok] / d2[ok]
    if out.ndim == 0:
        return float(out)
    return out


def holder_nonlinearity_ratio(z1, z2, m):
    """||z1|^(m-1) z1 - |z2|^(m-1) z2| / |z1-z2|^m, at most 5 for m in (0,1)."""
    if not 0.0 < m < 1.0:
        raise ValueError(f"m must lie in (0, 1), got {m}")
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    diff = np.abs(z1 - z2)
    num = np.abs(_f_singular(z1, m) - _f_singular(z2, m))
    out = np.zeros(np.broadcast(z1, z2).shape)
    ok = diff > 0.0
    out[ok] = num[ok] / diff[ok] ** m
    if out.ndim == 0:
        return float(out)
    return out


def check_gn(u_field: GridField, p_exp: float) -> dict:
    """Ratios lhs/rhs (with unit constant) of the two interpolation bounds.

    Form a: ||u||_2 against ||grad u||^alpha * ||u||_(p+1)^beta with
    alpha = N(1-p)/D, beta = 2(1+p)/D, D = (N+2) - p(N-2).
    Form b: ||u||_(p+1)^(p+1) against ||grad u||^(2pN/(N+2)) * ||u||_1^(D/(N+2)).
    """
    if not 0.0 <= p_exp <= 1.0:
        raise ValueError(f"p_exp must lie in [0, 1], got {p_exp}")
    N = u_field.mesh.dim_N
    R = u_field.mesh.domain.r_outer
    D = (N + 2.0) - p_exp * (N - 2.0)
    grad = math.sqrt(grad_l2_ball(u_field, R))
    n2 = lp_ball_norm(u_field, 2.0, R)
    np1 = lp_ball_norm(u_field, p_exp + 1.0, R)
    n1 = lp_ball_norm(u_field, 1.0, R)
    rhs_a = grad ** (N * (1.0 - p_exp) / D) * np1 ** (2.0 * (1.0 + p_exp) / D)
    rhs_b = grad ** (2.0 * p_exp * N / (N + 2.0)) * n1 ** (D / (N + 2.0))
    ratio_a = n2 / rhs_a if rhs_a > 0.0 else 0.0
    ratio_b = np1 ** (p_exp + 1.0) / rhs_b if rhs_b > 0.0 else 0.0
    return {"ratio_a": ratio_a, "ratio_b": ratio_b}


def check_interp_trace(u_field: GridField, rho: float, m: float) -> float:
    """Ratio of the sphere L2 norm at radius rho to the interpolation
    right-hand side (gradient plus scaled mass, to the theta power) with
    unit constant."""
    if not 0.0 < m < 1.0:
        raise ValueError(f"m must lie in (0, 1), got {m}")
    mesh = u_field.mesh
    N = mesh.dim_N
    j = mesh.node_index(rho)
    rho_s = float(mesh.nodes[j])
    if rho_s <= mesh.domain.r_inner:
        raise ValueError("rho must exceed the inner radius")
    k = 2.0 * (1.0 + m) + N * (1.0 - m)
    theta = ((1.0 + m) + N * (1.0 - m)) / k
    delta_it = k / (2.0 * (1.0 + m))
    lhs = math.sqrt(sphere_area(N) * rho_s ** (N - 1)) * abs(u_field.values[j])
    grad = math.sqrt(grad_l2_ball(u_field, rho_s))
    mass = lp_ball_norm(u_field, m + 1.0, rho_s)
    rhs = (grad + rho_s ** (-delta_it) * mass) ** theta * mass ** (1.0 - theta)
    if rhs == 0.0:
        return 0.0 if lhs == 0.0 else math.inf
    return lhs / rhs


def random_field(mesh, rng, modes: int = 8) -> GridField:
    """Random smooth field vanishing on the outer boundary: a cosine series
    on balls (flat at the center), a sine series on annuli."""
    dom = mesh.domain
    coeffs = (rng.standard_normal(modes) + 1j * rng.standard_normal(modes))
    coeffs = coeffs / np.arange(1, modes + 1)
    r = mesh.nodes
    vals = np.zeros(mesh.n, dtype=complex)
    if dom.kind == "ball":
        for k_i, c in enumerate(coeffs, start=1):
            vals += c * np.cos((k_i - 0.5) * math.pi * r / dom.r_outer)
    else:
        span = dom.r_outer - dom.r_inner
        for k_i, c in enumerate(coeffs, start=1):
            vals += c * np.sin(k_i * math.pi * (r - dom.r_inner) / span)
    return GridField(mesh, vals)


def sample_complex_pairs(rng, n: int):
    """Pairs with log-uniform moduli in [1e-6, 1e6] and uniform phases."""
    mod = 10.0 ** rng.uniform(-6.0, 6.0, size=(2, n))
    phase = rng.uniform(0.0, 2.0 * math.pi, size=(2, n))
    z = mod * np.exp(1j * phase)
    return z[0], z[1]


@dataclass
class IneqReport:
    """Result of one inequality sweep."""

    name: str
    samples: int
    worst: float
    passed: bool
    constant: float | None = None
    detail: dict = field(default_factory=dict)


def _default_mesh(dim_N: int, n_nodes: int = 129):
    return build_mesh(RadialDomain(dim_N=dim_N, r_inner=0.0, r_outer=1.0),
                      n_nodes)


def estimate_constant(ineq_id: str, sampler=None, n: int = 200, seed: int = 0,
                      m: float = 0.5, margin: float = 0.10) -> dict:
    """Empirical constant for one inequality family from n >= 100 samples.

    Upper-bound constants (gn, trace, holder) report the sample maximum
    inflated by the margin; the lower-bound constant (mono) reports the
    sample minimum deflated by it.  A custom sampler(rng) must return the
    arguments of the underlying check.
    """
    if n < 100:
        raise ValueError("constant estimation needs n >= 100 samples")
    rng = np.random.default_rng(seed)
    if ineq_id == "gn":
        vals = []
        for _ in range(n):
            if sampler is not None:
                u, p_exp = sampler(rng)
            else:
                mesh = _default_mesh(int(rng.integers(1, 4)))
                u = random_field(mesh, rng)
                p_exp = float(rng.uniform(0.0, 1.0))
            r = check_gn(u, p_exp)
            vals.append(max(r["ratio_a"], r["ratio_b"]))
        extreme = float(np.max(vals))
        return {"id": ineq_id, "constant": extreme * (1.0 + margin),
                "extreme": extreme, "n": n}
    if ineq_id == "trace":
        vals = []
        for _ in range(n):
            if sampler is not None:
                u, rho, mm = sampler(rng)
            else:
                mesh = _default_mesh(int(rng.integers(1, 4)))
                u = random_field(mesh, rng)
                rho = float(rng.uniform(0.2, 1.0))
                mm = m
            vals.append(check_interp_trace(u, rho, mm))
        extreme = float(np.max(vals))
        return {"id": ineq_id, "constant": extreme * (1.0 + margin),
                "extreme": extreme, "n": n}
    if ineq_id in ("mono", "holder"):
        if sampler is not None:
            z1, z2 = sampler(rng)
        else:
            z1, z2 = sample_complex_pairs(rng, n)
        if ineq_id == "mono":
            gaps = monotonicity_gap(z1, z2, m)
            finite = gaps[np.isfinite(gaps)]
            extreme = float(np.min(finite)) if len(finite) else math.inf
            return {"id": ineq_id, "constant": extreme / (1.0 + margin),
                    "extreme": extreme, "n": int(np.size(z1))}
        ratios = holder_nonlinearity_ratio(z1, z2, m)
        extreme = float(np.max(ratios))
        return {"id": ineq_id, "constant": extreme * (1.0 + margin),
                "extreme": extreme, "n": int(np.size(z1))}
    raise ValueError(f"unknown inequality id {ineq_id!r}")


def run_suite(which: str = "all", samples: int = 10000, seed: int = 0,
              m: float = 0.5) -> list[IneqReport]:
    """Run the requested sweeps and return one report per inequality."""
    names = ("young", "gn", "trace", "mono", "holder")
    if which != "all" and which not in names:
        raise ValueError(f"unknown inequality selector {which!r}")
    todo = names if which == "all" else (which,)
    rng = np.random.default_rng(seed)
    reports = []
    for name in todo:
        if name == "young":
            x = 10.0 ** rng.uniform(-6.0, 6.0, size=samples)
            y = 10.0 ** rng.uniform(-6.0, 6.0, size=samples)
            eps = 10.0 ** rng.uniform(-3.0, 3.0, size=samples)
            p = rng.uniform(1.001, 10.0, size=samples)
            slack = check_young(x, y, eps, p)
            worst = float(np.min(slack))
            reports.append(IneqReport(name=name, samples=samples, worst=worst,
                                      passed=bool(worst >= 0.0)))
        elif name == "mono":
            z1, z2 = sample_complex_pairs(rng, samples)
            gaps = monotonicity_gap(z1, z2, m)
            finite = gaps[np.isfinite(gaps)]
            worst = float(np.min(finite))
            reports.append(IneqReport(name=name, samples=samples, worst=worst,
                                      passed=bool(worst >= -1e-12),
                                      constant=worst))
        elif name == "holder":
            z1, z2 = sample_complex_pairs(rng, samples)
            ratios = holder_nonlinearity_ratio(z1, z2, m)
            worst = float(np.max(ratios))
            reports.append(IneqReport(name=name, samples=samples, worst=worst,
                                      passed=bool(worst <= 5.0),
                                      constant=worst))
        elif name == "gn":
            n_est = max(100, samples // 100)
            est = estimate_constant("gn", n=n_est, seed=seed, m=m)
            reports.append(IneqReport(name=name, samples=n_est,
                                      worst=est["extreme"], passed=True,
                                      constant=est["constant"], detail=est))
        elif name == "trace":
            n_est = max(100, samples // 100)
            est = estimate_constant("trace", n=n_est, seed=seed + 1, m=m)
            reports.append(IneqReport(name=name, samples=n_est,
                                      worst=est["extreme"], passed=True,
                                      constant=est["constant"], detail=est))
    return reports
