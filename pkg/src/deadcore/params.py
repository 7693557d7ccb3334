"""Complex coefficient algebra for the absorption equation.

The equation -i*Lap(u) + a*|u|^(m-1)*u + b*u = F is controlled by where the
pair (a, b) sits in C^2.  This module decides membership in the admissible
regions, evaluates the existence and uniqueness hypotheses, builds the
positive constants L and M (and friends) that drive every energy estimate,
and combines bounded quantities into the one-sided estimate those constants
were designed for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class HypothesisError(ValueError):
    """A coefficient or smallness hypothesis required by an estimate fails."""

    reason = "hypothesis_failed"


def _as_complex(z, name="z"):
    """Coerce to a python complex with finite components."""
    try:
        z = complex(z)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{name} is not a complex scalar: {z!r}") from exc
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{name} must have finite components, got {z!r}")
    return z


def in_set_A(z) -> bool:
    """True iff z avoids the closed negative imaginary semi-axis.

    The set is the complex plane minus {Re(z) = 0 and Im(z) <= 0}.
    Comparisons are exact: the boundary is a genuine set boundary, not a
    numerical tolerance question.
    """
    z = _as_complex(z)
    return not (z.real == 0.0 and z.imag <= 0.0)


def in_set_B(z) -> bool:
    """True iff z is in the A-set or is exactly zero."""
    z = _as_complex(z)
    return z == 0 or in_set_A(z)


def check_existence(a, b) -> bool:
    """Existence hypothesis on the coefficient pair.

    Requires a in the A-set, b in the B-set, and compatible real parts:
    either Re(a)*Re(b) >= 0, or Re(a)*Re(b) < 0 together with
    Im(b) > (Re(b)/Re(a)) * Im(a).
    """
    a = _as_complex(a, "a")
    b = _as_complex(b, "b")
    if not (in_set_A(a) and in_set_B(b)):
        return False
    if a.real * b.real >= 0.0:
        return True
    # Re(a)*Re(b) < 0 guarantees both real parts are nonzero.
    return b.imag > (b.real / a.real) * a.imag


def check_uniqueness(a, b) -> bool:
    """Uniqueness hypothesis: Im(a) >= 0 plus a sign condition.

    For a != 0 the condition is Re(a * conj(b)) >= 0; for a = 0 it is
    membership of b in the B-set.
    """
    a = _as_complex(a, "a")
    b = _as_complex(b, "b")
    if a.imag < 0.0:
        return False
    if a != 0:
        return (a * b.conjugate()).real >= 0.0
    return in_set_B(b)


@dataclass(frozen=True)
class ParamPair:
    """Coefficient pair with auxiliary delta and recomputed hypothesis flags."""

    a: complex
    b: complex
    delta: float
    exists_ok: bool
    unique_ok: bool


def make_params(a, b, delta: float = 1.0) -> ParamPair:
    """Validate (a, b, delta) and attach the hypothesis flags."""
    a = _as_complex(a, "a")
    b = _as_complex(b, "b")
    delta = float(delta)
    if not (math.isfinite(delta) and delta > 0.0):
        raise ValueError(f"delta must be a positive finite real, got {delta}")
    return ParamPair(
        a=a,
        b=b,
        delta=delta,
        exists_ok=check_existence(a, b),
        unique_ok=check_uniqueness(a, b),
    )


@dataclass(frozen=True)
class ConstantPack:
    """Estimate constants attached to an admissible pair (a, b).

    A_delta and B are None when their defining real part vanishes.  The
    fields M0, M0_tilde and delta_bound_exponent depend on the nonlinearity
    exponent m (and the dimension for the last two), so they are None unless
    `constants` was given m (and dim_N).
    """

    a: complex
    b: complex
    delta: float
    A_delta: float | None
    B: float | None
    L: float
    M: float
    L1: float
    m: float | None = None
    dim_N: int | None = None
    M0: float | None = None
    M0_tilde: float | None = None
    delta_bound_exponent: float | None = None


def constants(a, b, delta: float = 1.0, m: float | None = None,
              dim_N: int | None = None) -> ConstantPack:
    """Build the constant pack (A(delta), B, L, M, L1, and m-dependent tails).

    The L and M values follow the literal sign case tables; those tables are
    only total under the existence hypothesis, so inadmissible pairs are
    rejected.

    Inputs
    ------
    a, b : complex coefficients, must satisfy the existence hypothesis
    delta : positive auxiliary parameter entering A(delta) and one L row
    m : optional exponent in (0, 1); unlocks M0
    dim_N : optional dimension >= 1; with m, unlocks M0_tilde and the
        a-priori bound exponent 2(1-m)/((N+2) - m(N-2))
    """
    pair = make_params(a, b, delta)
    if not pair.exists_ok:
        raise ValueError("constants undefined: (a, b) fails the existence hypothesis")
    a, b, delta = pair.a, pair.b, pair.delta

    A_delta = None
    if a.real != 0.0:
        A_delta = (abs(a.real) + abs(a.imag) + delta) / abs(a.real)
    B = None
    if b.real != 0.0:
        B = (abs(b.real) + abs(b.imag)) / abs(b.real)

    rere = a.real * b.real
    if a.imag < 0.0 and rere >= 0.0:
        L = delta
    elif a.imag == 0.0 and b.imag >= 0.0 and rere >= 0.0:
        L = abs(a.real)
    elif a.imag > 0.0 and b.imag >= 0.0:
        L = a.imag
    else:
        L = a.imag - (a.real / b.real) * b.imag

    if a.imag < 0.0 and b.imag < 0.0 and rere >= 0.0:
        M = max(A_delta, B)
    elif a.imag < 0.0 and b.imag >= 0.0 and rere >= 0.0:
        M = A_delta
    elif a.imag >= 0.0 and b.imag >= 0.0 and (a.imag > 0.0 or rere >= 0.0):
        M = 2.0
    else:
        M = B

    if not (L > 0.0 and M > 0.0):
        # The hypothesis guarantees positivity; reaching this means a bug.
        raise AssertionError(f"case table produced L={L}, M={M} for a={a}, b={b}")

    L1 = max(1.0, 1.0 / L)
    M0 = M0_tilde = dbe = None
    if m is not None:
        m = float(m)
        if not 0.0 < m < 1.0:
            raise ValueError(f"m must lie in (0, 1), got {m}")
        M0 = M * (2.0 * M / L) ** (1.0 / m) * max(1.0, 2.0 / L)
        if dim_N is not None:
            dim_N = int(dim_N)
            if dim_N < 1:
                raise ValueError(f"dim_N must be >= 1, got {dim_N}")
            dbe = 2.0 * (1.0 - m) / ((dim_N + 2) - m * (dim_N - 2))
            M0_tilde = M0 * (1.0 + M0 ** dbe)

    return ConstantPack(a=a, b=b, delta=delta, A_delta=A_delta, B=B, L=L, M=M,
                        L1=L1, m=m, dim_N=dim_N, M0=M0, M0_tilde=M0_tilde,
                        delta_bound_exponent=dbe)


def combine_estimates(pack: ConstantPack, C0: float, C1: float, C2: float,
                      C3: float) -> bool:
    """Check the combined estimate 0 <= C1 + L*C2 <= M*C0.

    The inputs must be admissible: all nonnegative, with
    |C1 + Im(a)*C2 + Im(b)*C3| <= C0 and |Re(a)*C2 + Re(b)*C3| <= C0.
    For every admissible tuple the estimate is guaranteed to hold; the
    boolean return (tolerance 1e-12 * (1 + M*C0)) is the verification.
    """
    a, b = pack.a, pack.b
    vals = [float(C0), float(C1), float(C2), float(C3)]
    if any(not math.isfinite(v) or v < 0.0 for v in vals):
        raise ValueError(f"C0..C3 must be finite and nonnegative, got {vals}")
    C0, C1, C2, C3 = vals
    tol = 1e-12 * (1.0 + C0 + C1 + C2 + C3)
    if abs(C1 + a.imag * C2 + b.imag * C3) > C0 + tol:
        raise ValueError("inadmissible tuple: imaginary-part constraint fails")
    if abs(a.real * C2 + b.real * C3) > C0 + tol:
        raise ValueError("inadmissible tuple: real-part constraint fails")
    lhs = C1 + pack.L * C2
    slack = 1e-12 * (1.0 + pack.M * C0)
    return -slack <= lhs <= pack.M * C0 + slack


def classify_region(a, b) -> dict:
    """Flags {in_A, in_B, exists, unique} for one coefficient pair."""
    a = _as_complex(a, "a")
    b = _as_complex(b, "b")
    return {
        "in_A": in_set_A(a),
        "in_B": in_set_B(b),
        "exists": check_existence(a, b),
        "unique": check_uniqueness(a, b),
    }


def region_scan(re_a_grid, im_a_grid, re_b_grid, im_b_grid):
    """Classify every point of a rectangular (a, b) grid.

    Yields rows (re_a, im_a, re_b, im_b, flags) in row-major order over the
    four axes.  Grids must be nonempty sequences of reals.
    """
    grids = [list(map(float, g)) for g in
             (re_a_grid, im_a_grid, re_b_grid, im_b_grid)]
    if any(len(g) == 0 for g in grids):
        raise ValueError("empty grid axis in region scan")
    for re_a in grids[0]:
        for im_a in grids[1]:
            for re_b in grids[2]:
                for im_b in grids[3]:
                    a = complex(re_a, im_a)
                    b = complex(re_b, im_b)
                    yield re_a, im_a, re_b, im_b, classify_region(a, b)


def centered_axis(lo: float, hi: float, n: int):
    """n cell-centered samples of [lo, hi]; midpoints avoid the axis lines."""
    if n < 1:
        raise ValueError("need at least one sample")
    h = (hi - lo) / n
    return [lo + (j + 0.5) * h for j in range(n)]
