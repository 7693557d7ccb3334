"""Dead-core predictions: exponents, energy profiles, vanishing radii,
smallness thresholds, support detection, and the differential-inequality
audit with its calibration workflow.

The central quantity is rho_max: given that the source vanishes on the ball
of radius rho0, the solution itself must vanish on the (possibly smaller)
ball of radius rho_max, computed from the energy E(rho0), the mass b(rho0),
the constant pack (L, M), and a minimization over an auxiliary exponent tau.
All unspecified universal constants are represented by a single calibration
scalar C_cal, default 1, with a workflow to fit it on solved instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mesh import (GridField, boundary_flux_I, grad_l2_ball, lp_ball_norm,
                   source_term_J)
from .params import ConstantPack, HypothesisError


@dataclass(frozen=True)
class ExponentPack:
    """All exponents derived from (m, N)."""

    m: float
    dim_N: int
    k: float
    nu: float
    theta: float
    ell_gn: float
    delta_it: float
    p: float

    def gamma(self, tau):
        return (2.0 * np.asarray(tau) - (1.0 + self.m)) / self.k

    def mu(self, tau):
        return 2.0 * (1.0 - np.asarray(tau)) / self.k

    def eta(self, tau):
        return (1.0 - self.m) / (1.0 + self.m) - self.gamma(tau)

    @property
    def tau_lo(self) -> float:
        return (1.0 + self.m) / 2.0


def exponent_pack(m: float, dim_N: int) -> ExponentPack:
    m = float(m)
    if not 0.0 < m < 1.0:
        raise ValueError(f"m must lie in (0, 1), got {m}")
    N = int(dim_N)
    if N < 1:
        raise ValueError(f"dim_N must be >= 1, got {dim_N}")
    k = 2.0 * (1.0 + m) + N * (1.0 - m)
    nu = k / (m + 1.0)
    theta = ((1.0 + m) + N * (1.0 - m)) / k
    pack = ExponentPack(m=m, dim_N=N, k=k, nu=nu, theta=theta,
                        ell_gn=1.0 / (theta * (1.0 + m)),
                        delta_it=k / (2.0 * (1.0 + m)), p=k / (1.0 - m))
    assert pack.nu > 2.0 and pack.p > N + 2
    assert pack.eta(1.0) > 0.0
    return pack


@dataclass
class EnergyProfiles:
    """Node-indexed ball functionals of a solution and its source."""

    rho_grid: np.ndarray
    E: np.ndarray   # squared gradient L2 mass
    b: np.ndarray   # L^(m+1) mass to the power m+1
    m2: np.ndarray  # squared L2 mass
    I: np.ndarray   # boundary flux functional
    J: np.ndarray   # integral of |F||u|

    def index_of(self, rho: float) -> int:
        grid = self.rho_grid
        h = grid[1] - grid[0]
        pad = 1e-9 * (grid[-1] - grid[0])
        if not (grid[0] - pad <= rho <= grid[-1] + pad):
            raise ValueError(f"rho={rho} outside profile range [{grid[0]}, {grid[-1]}]")
        j = int(round((rho - grid[0]) / h))
        return min(max(j, 0), len(grid) - 1)


def energy_profiles(u: GridField, F: GridField, m: float) -> EnergyProfiles:
    """Evaluate E, b, m2, I, J at every node radius."""
    mesh = u.mesh
    n = mesh.n
    E = np.empty(n)
    bmass = np.empty(n)
    m2 = np.empty(n)
    I = np.empty(n)
    J = np.empty(n)
    for j, rho in enumerate(mesh.nodes):
        E[j] = grad_l2_ball(u, rho)
        bmass[j] = lp_ball_norm(u, m + 1.0, rho) ** (m + 1.0)
        m2[j] = lp_ball_norm(u, 2.0, rho) ** 2
        I[j] = boundary_flux_I(u, rho, allow_onesided=True) \
            if abs(u.values[j]) > 0.0 else 0.0
        J[j] = source_term_J(u, F, rho)
    return EnergyProfiles(rho_grid=mesh.nodes.copy(), E=E, b=bmass, m2=m2,
                          I=I, J=J)


def source_lq_profile(F: GridField, m: float) -> np.ndarray:
    """||F|| in L^((m+1)/m) over the ball of each node radius."""
    q = (m + 1.0) / m
    return np.array([lp_ball_norm(F, q, rho) for rho in F.mesh.nodes])


def _maxpow(base: float, e1: float, e2: float) -> float:
    """max{base^e1, base^e2} with the zero-base convention 0."""
    if base == 0.0:
        return 0.0
    return max(base ** e1, base ** e2)


def _golden_min(f, lo: float, hi: float, tol: float = 1e-13):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(200):
        if b - a <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _tau_minimum(E0: float, b0: float, exps: ExponentPack, tau_grid: int):
    """Minimize E0^gamma * max{b0^mu, b0^eta} / (2*tau - (1+m)) over tau."""
    m = exps.m
    lo = exps.tau_lo + 1e-6
    hi = 1.0
    if tau_grid < 2:
        raise ValueError("tau grid needs at least 2 points")
    taus = np.linspace(lo, hi, max(tau_grid, 200))

    def phi(tau: float) -> float:
        g = float(exps.gamma(tau))
        return E0 ** g * _maxpow(b0, float(exps.mu(tau)), float(exps.eta(tau))) \
            / (2.0 * tau - (1.0 + m))

    vals = np.array([phi(t) for t in taus])
    j = int(np.argmin(vals))
    bl = taus[max(j - 1, 0)]
    br = taus[min(j + 1, len(taus) - 1)]
    tau_star, fmin = _golden_min(phi, bl, br)
    if vals[j] < fmin:
        tau_star, fmin = float(taus[j]), float(vals[j])
    return tau_star, fmin


def rho_max(profiles: EnergyProfiles, pack: ConstantPack, exps: ExponentPack,
            rho0: float, C_cal: float = 1.0, tau_grid: int = 200):
    """Predicted vanishing radius and the minimizing tau.

    Requires the source to vanish on the ball of radius rho0, checked
    against the J profile.  Returns (rho_max_predicted, tau_star); the
    prediction is rho0 itself when the ball energy vanishes, and can drop
    to 0 through the positive part when the energy is large.
    """
    if C_cal <= 0.0:
        raise ValueError("C_cal must be positive")
    j0 = profiles.index_of(rho0)
    j_tol = 1e-12 * (1.0 + float(profiles.J[-1]))
    if profiles.J[j0] > j_tol:
        raise HypothesisError(
            f"source does not vanish on the ball of radius {rho0} "
            f"(J={profiles.J[j0]:.3e})")
    rho0s = float(profiles.rho_grid[j0])
    E0 = float(profiles.E[j0])
    b0 = float(profiles.b[j0])
    if E0 <= 0.0 or b0 <= 0.0:
        return rho0s, 1.0
    tau_star, fmin = _tau_minimum(E0, b0, exps, tau_grid)
    big = C_cal * pack.M ** 2 * max(1.0, 1.0 / pack.L ** 2) \
        * max(rho0s ** (exps.nu - 1.0), 1.0) * fmin
    core = rho0s ** exps.nu - big
    pred = max(core, 0.0) ** (1.0 / exps.nu)
    return pred, tau_star


def vanishing_thresholds(pack: ConstantPack, exps: ExponentPack, rho0: float,
                         rho1: float, b_at_rho1: float, C_cal: float = 1.0):
    """Energy and source thresholds (E_star, eps_star) for forced vanishing.

    Below E_star on the outer ball, and with the source mass under
    eps_star * (rho - rho0)_+^p inside it, the solution vanishes on the
    rho0-ball.  A zero outer mass returns the +inf sentinel for both (any
    field passes).
    """
    if not 0.0 < rho0 < rho1:
        raise ValueError(f"need 0 < rho0 < rho1, got ({rho0}, {rho1})")
    if b_at_rho1 < 0.0:
        raise ValueError("b_at_rho1 must be nonnegative")
    gamma1 = float(exps.gamma(1.0))
    eta1 = float(exps.eta(1.0))
    K1 = C_cal * pack.L1 ** 2 * pack.M ** 2 * max(rho1 ** (exps.nu - 1.0), 1.0) \
        * _maxpow(b_at_rho1, 0.0, eta1)
    if K1 == 0.0:
        return math.inf, math.inf
    K = K1 * rho0 ** (-(exps.nu - 1.0))
    E_star = ((gamma1 / (2.0 * K)) * (rho1 - rho0)) ** (1.0 / gamma1)
    p = 1.0 / gamma1
    p_conj = p / (p - 1.0)
    eps_star = (gamma1 / (2.0 * K)) ** p \
        / (2.0 ** p_conj * (4.0 * pack.L1 * pack.M) ** ((exps.m + 1.0) / exps.m))
    return E_star, eps_star


def smallness_checks(profiles: EnergyProfiles, pack: ConstantPack,
                     exps: ExponentPack, rho0: float, s: float,
                     C_cal: float = 1.0) -> dict:
    """Verdicts for the two source-free smallness criteria.

    Hypotheses (source vanishing on the double ball, unit mass) are checked
    from the profiles and reported; when one fails the corresponding verdict
    is None rather than a silent pass.  The second criterion additionally
    needs a unit gradient bound.
    """
    m = exps.m
    if not 0.0 < s < (1.0 - m) / 2.0:
        raise ValueError(f"s must lie in (0, (1-m)/2), got {s}")
    if rho0 <= 0.0:
        raise ValueError("rho0 must be positive")
    j2 = profiles.index_of(min(2.0 * rho0, float(profiles.rho_grid[-1])))
    j_tol = 1e-12 * (1.0 + float(profiles.J[-1]))
    hyp_source = bool(profiles.J[j2] <= j_tol)
    E2 = float(profiles.E[j2])
    b2 = float(profiles.b[j2])
    hyp_mass = bool(b2 <= 1.0 + 1e-12)
    common = (1.0 / C_cal) * (2.0 ** exps.nu - 1.0) / pack.M ** 2 \
        * min(1.0, pack.L ** 2) * min(0.5, rho0) ** (exps.nu - 1.0) * rho0
    lhs1 = E2 ** ((1.0 - m) / exps.k)
    rhs1 = (1.0 - m) * common
    lhs2 = b2 ** (2.0 * s / exps.k)
    rhs2 = (1.0 - m - 2.0 * s) * common
    grad_ok = bool(E2 <= 1.0 + 1e-12)
    hyps = hyp_source and hyp_mass
    return {
        "hypothesis_source_free": hyp_source,
        "hypothesis_mass_le_1": hyp_mass,
        "grad_le_1": grad_ok,
        "lhs1": lhs1, "rhs1": rhs1,
        "check1": bool(lhs1 <= rhs1) if hyps else None,
        "lhs2": lhs2, "rhs2": rhs2,
        "check2": bool(grad_ok and lhs2 <= rhs2) if hyps else None,
    }


def localization_threshold(epsilon: float, pack: ConstantPack,
                           exps: ExponentPack, C_cal: float = 1.0) -> float:
    """Largest source size delta0 forcing supp(u) into the epsilon-
    neighborhood of supp(F), found by bisection to 1e-6 relative.

    The conditions are monotone in delta: the a-priori bound must keep the
    solution mass at most 1 and the resulting energy under the smallness
    right-hand side evaluated at radius epsilon/4.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    if pack.M0 is None:
        raise ValueError("constant pack lacks M0; build it with m")
    m = exps.m
    rhs = (1.0 / C_cal) * 2.0 ** (-2.0 * exps.nu) * (2.0 ** exps.nu - 1.0) \
        * (1.0 - m) / pack.M ** 2 * min(1.0, pack.L ** 2) \
        * min(2.0, epsilon) ** (exps.nu - 1.0) * epsilon

    def ok(delta: float) -> bool:
        X = pack.M0 * delta ** ((m + 1.0) / m)
        return X <= 1.0 and X ** ((1.0 - m) / exps.k) <= rhs

    lo = 0.0
    hi = 1.0
    while ok(hi):
        lo = hi
        hi *= 2.0
        if hi > 1e150:
            return lo
    for _ in range(200):
        if hi - lo <= 1e-6 * hi:
            break
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def numeric_support_radius(u: GridField, threshold_rel: float = 1e-8) -> float:
    """Smallest node radius beyond which |u| stays under the relative
    threshold; r_outer if the field never dies out, r_inner if it is zero."""
    if not 0.0 < threshold_rel < 1.0:
        raise ValueError("threshold_rel must lie in (0, 1)")
    mod = np.abs(u.values)
    mx = float(mod.max())
    if mx == 0.0:
        return u.mesh.domain.r_inner
    thr = threshold_rel * mx
    tail = np.maximum.accumulate(mod[::-1])[::-1]
    idx = np.nonzero(tail <= thr)[0]
    if len(idx) == 0:
        return u.mesh.domain.r_outer
    return float(u.mesh.nodes[idx[0]])


def zero_ball_radius(u: GridField, threshold_rel: float = 1e-8) -> float:
    """Largest node radius rho with |u| under the relative threshold on the
    whole inner ball; r_inner if the field is live at the center."""
    if not 0.0 < threshold_rel < 1.0:
        raise ValueError("threshold_rel must lie in (0, 1)")
    mod = np.abs(u.values)
    mx = float(mod.max())
    if mx == 0.0:
        return u.mesh.domain.r_outer
    thr = threshold_rel * mx
    head = np.maximum.accumulate(mod)
    idx = np.nonzero(head <= thr)[0]
    if len(idx) == 0:
        return u.mesh.domain.r_inner
    return float(u.mesh.nodes[idx[-1]])


def audit_differential_inequality(profiles: EnergyProfiles, pack: ConstantPack,
                                  exps: ExponentPack, tau: float,
                                  F_norms: np.ndarray, C_cal: float = 1.0,
                                  tol: float | None = None) -> dict:
    """Per-node slack of the energy differential inequality.

    At each positive radius the inequality bounds E^(1-gamma) by the
    derivative term K1 * rho^(1-nu) * E' plus a source term; E' comes from
    forward differences of the (nondecreasing) profile.  Nodes whose slack
    drops below -tol are reported as violations.
    """
    m = exps.m
    if not exps.tau_lo < tau <= 1.0:
        raise ValueError(f"tau must lie in ({exps.tau_lo}, 1], got {tau}")
    F_norms = np.asarray(F_norms, dtype=float)
    if F_norms.shape != profiles.rho_grid.shape:
        raise ValueError("F_norms must align with the profile grid")
    gamma = float(exps.gamma(tau))
    rho2 = float(profiles.rho_grid[-1])
    b2 = float(profiles.b[-1])
    K1 = C_cal * pack.L1 ** 2 * pack.M ** 2 * max(rho2 ** (exps.nu - 1.0), 1.0) \
        * _maxpow(b2, float(exps.mu(tau)), float(exps.eta(tau)))
    grid = profiles.rho_grid
    h = float(grid[1] - grid[0])
    Eprime = np.empty_like(profiles.E)
    Eprime[:-1] = np.diff(profiles.E) / h
    Eprime[-1] = Eprime[-2]
    lhs = profiles.E ** (1.0 - gamma)
    src = (4.0 * pack.L1 * pack.M) ** ((m + 1.0) * (1.0 - gamma) / m) \
        * F_norms ** ((m + 1.0) * (1.0 - gamma) / m)
    mask = grid > 0.0
    rinv = np.zeros_like(grid)
    rinv[mask] = grid[mask] ** (-(exps.nu - 1.0))
    slack = K1 * rinv * Eprime + src - lhs
    if tol is None:
        tol = 1e-10 + 10.0 * h * float(np.max(lhs, initial=0.0))
    bad = mask & (slack < -tol)
    violations = [(float(grid[j]), float(slack[j])) for j in np.nonzero(bad)[0]]
    checked = int(np.count_nonzero(mask))
    min_slack = float(np.min(slack[mask])) if checked else 0.0
    return {"min_slack": min_slack, "violations": violations,
            "num_checked": checked, "tolerance": float(tol), "K1": K1}


@dataclass
class SupportReport:
    """Everything the analyze workflow measures on one solved instance."""

    rho_max_predicted: float
    tau_star: float
    observed_support_radius: float
    observed_zero_ball_radius: float
    thresholds: dict
    verdicts: dict
    calibration_C: float


def analyze(problem, u: GridField, rho0: float, C_cal: float = 1.0,
            threshold_rel: float = 1e-8, tau_grid: int = 200,
            s: float | None = None) -> SupportReport:
    """Full support analysis of a solved instance.

    rho0 is the radius of the source-free central ball.  The thresholds map
    evaluates the vanishing thresholds at rho1 = min(2*rho0, R), the
    smallness right-hand sides for a dead core on the rho0/2-ball, and the
    source-size threshold for an epsilon-neighborhood localization with
    epsilon = half the gap between supp(F) and the outer boundary.
    """
    from .params import constants
    from .sources import support_outer_radius

    m = problem.m
    N = problem.domain.dim_N
    R = problem.domain.r_outer
    h = u.mesh.h
    if not 0.0 < rho0 < R:
        raise ValueError(f"rho0 must lie in (0, {R}), got {rho0}")
    exps = exponent_pack(m, N)
    pack = constants(problem.params.a, problem.params.b, problem.params.delta,
                     m=m, dim_N=N)
    profiles = energy_profiles(u, problem.source_F, m)
    pred, tau_star = rho_max(profiles, pack, exps, rho0, C_cal, tau_grid)
    observed = numeric_support_radius(u, threshold_rel)
    zero_ball = zero_ball_radius(u, threshold_rel)

    rho1 = min(2.0 * rho0, R)
    if rho1 <= rho0:
        rho1 = R
    b1 = float(profiles.b[profiles.index_of(rho1)])
    E_star, eps_star = vanishing_thresholds(pack, exps, rho0, rho1, b1, C_cal)

    if s is None:
        s = (1.0 - m) / 4.0
    small = smallness_checks(profiles, pack, exps, rho0 / 2.0, s, C_cal)

    r_F = support_outer_radius(problem.source_F)
    epsilon = 0.5 * (R - r_F) if R > r_F else h
    epsilon = max(epsilon, h)
    delta0 = localization_threshold(epsilon, pack, exps, C_cal)
    q = (m + 1.0) / m
    F_q = lp_ball_norm(problem.source_F, q, R)

    thresholds = {
        "E_star": E_star,
        "eps_star": eps_star,
        "smallness_energy_rhs": small["rhs1"],
        "smallness_mass_rhs": small["rhs2"],
        "delta0": delta0,
        "epsilon": epsilon,
    }
    verdicts = {
        "source_free_ball": True,
        "prediction_contained": bool(pred <= zero_ball + 0.5 * h),
        "smallness_energy": small["check1"],
        "smallness_mass": small["check2"],
        "compact_support_observed": bool(observed < R - 2.0 * h),
        "source_below_delta0": bool(F_q <= delta0),
        "energy_below_E_star": bool(profiles.E[profiles.index_of(rho1)] < E_star),
    }
    return SupportReport(rho_max_predicted=pred, tau_star=tau_star,
                         observed_support_radius=observed,
                         observed_zero_ball_radius=zero_ball,
                         thresholds=thresholds, verdicts=verdicts,
                         calibration_C=C_cal)


@dataclass
class CalibrationInstance:
    """One solved dead-core instance feeding the calibration."""

    problem: object
    u: GridField
    rho0: float


def calibrate_C(instances, floor: float = 1.0, margin: float = 1.1,
                threshold_rel: float = 1e-8, tau_grid: int = 200):
    """Smallest calibration constant consistent with every instance.

    Two constraints per instance: the predicted vanishing ball must stay
    inside the observed zero set (containment), and the differential
    inequality audited at tau = 1 must have no violations.  Both right-hand
    sides grow with C, so each instance yields a minimal C; the result is
    the family maximum with a safety margin, floored.
    """
    from .params import constants

    instances = list(instances)
    if not instances:
        raise ValueError("calibration needs at least one instance")
    details = []
    worst = 0.0
    for inst in instances:
        prob, u, rho0 = inst.problem, inst.u, inst.rho0
        m = prob.m
        exps = exponent_pack(m, prob.domain.dim_N)
        pack = constants(prob.params.a, prob.params.b, prob.params.delta,
                         m=m, dim_N=prob.domain.dim_N)
        profiles = energy_profiles(u, prob.source_F, m)
        F_norms = source_lq_profile(prob.source_F, m)
        h = u.mesh.h
        j0 = profiles.index_of(rho0)
        rho0s = float(profiles.rho_grid[j0])
        E0, b0 = float(profiles.E[j0]), float(profiles.b[j0])
        z = zero_ball_radius(u, threshold_rel)

        if E0 <= 0.0 or b0 <= 0.0:
            C_cont = 0.0 if z + 0.5 * h >= rho0s else math.inf
        else:
            _, fmin = _tau_minimum(E0, b0, exps, tau_grid)
            D = pack.M ** 2 * max(1.0, 1.0 / pack.L ** 2) \
                * max(rho0s ** (exps.nu - 1.0), 1.0) * fmin
            gap = rho0s ** exps.nu - (z + 0.5 * h) ** exps.nu
            C_cont = max(gap, 0.0) / D if D > 0.0 else (
                0.0 if gap <= 0.0 else math.inf)

        # audit at tau=1: smallest C with slack >= -tol at every radius
        gamma = float(exps.gamma(1.0))
        rho2 = float(profiles.rho_grid[-1])
        b2 = float(profiles.b[-1])
        K1_unit = pack.L1 ** 2 * pack.M ** 2 * max(rho2 ** (exps.nu - 1.0), 1.0) \
            * _maxpow(b2, float(exps.mu(1.0)), float(exps.eta(1.0)))
        grid = profiles.rho_grid
        Eprime = np.empty_like(profiles.E)
        Eprime[:-1] = np.diff(profiles.E) / h
        Eprime[-1] = Eprime[-2]
        lhs = profiles.E ** (1.0 - gamma)
        src = (4.0 * pack.L1 * pack.M) ** ((m + 1.0) * (1.0 - gamma) / m) \
            * F_norms ** ((m + 1.0) * (1.0 - gamma) / m)
        tol = 1e-10 + 10.0 * h * float(np.max(lhs, initial=0.0))
        C_audit = 0.0
        for j in np.nonzero(grid > 0.0)[0]:
            need = lhs[j] - src[j] - tol
            if need <= 0.0:
                continue
            den = K1_unit * grid[j] ** (1.0 - exps.nu) * max(Eprime[j], 0.0)
            C_audit = math.inf if den <= 0.0 else max(C_audit, need / den)

        C_inst = max(C_cont, C_audit)
        details.append({"rho0": rho0s, "zero_ball": z,
                        "C_containment": C_cont, "C_audit": C_audit,
                        "C_instance": C_inst})
        worst = max(worst, C_inst)

    if math.isinf(worst):
        raise ArithmeticError(
            "no finite calibration constant satisfies every instance")
    return max(floor, margin * worst), details
