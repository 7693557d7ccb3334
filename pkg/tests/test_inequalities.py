"""Pointwise and functional inequality sweeps."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from deadcore import RadialDomain, build_mesh
from deadcore.inequalities import (IneqReport, check_gn, check_interp_trace,
                                   check_young, estimate_constant,
                                   holder_nonlinearity_ratio,
                                   monotonicity_gap, random_field, run_suite,
                                   sample_complex_pairs)


def test_young_sharp_case_and_validation():
    assert check_young(1.0, 1.0, 1.0, 2.0) == 0.0
    with pytest.raises(ValueError):
        check_young(-1.0, 1.0, 1.0, 2.0)
    with pytest.raises(ValueError):
        check_young(1.0, 1.0, 0.0, 2.0)
    with pytest.raises(ValueError):
        check_young(1.0, 1.0, 1.0, 1.0)


@given(x=st.floats(min_value=0.0, max_value=1e6),
       y=st.floats(min_value=0.0, max_value=1e6),
       eps=st.floats(min_value=1e-3, max_value=1e3),
       p=st.floats(min_value=1.01, max_value=10.0))
def test_young_slack_nonnegative(x, y, eps, p):
    assert check_young(x, y, eps, p) >= 0.0


def test_monotonicity_gap_oracles():
    assert monotonicity_gap(1.0, 0.0, 0.5) == pytest.approx(1.0, rel=1e-15)
    assert monotonicity_gap(1.0, 1.0, 0.5) == math.inf
    # scale invariance: the gap only depends on the shape of the pair
    g1 = monotonicity_gap(1.0 + 1j, 0.5 - 2j, 0.3)
    g2 = monotonicity_gap(256.0 * (1.0 + 1j), 256.0 * (0.5 - 2j), 0.3)
    assert g2 == pytest.approx(g1, rel=1e-12)


complex_st = st.builds(complex,
                       st.floats(min_value=-1e3, max_value=1e3,
                                 allow_nan=False),
                       st.floats(min_value=-1e3, max_value=1e3,
                                 allow_nan=False))


@given(z1=complex_st, z2=complex_st,
       m=st.sampled_from([0.1, 0.3, 0.5, 0.7, 0.9]))
def test_monotonicity_gap_nonnegative(z1, z2, m):
    assert monotonicity_gap(z1, z2, m) >= -1e-12


@given(z1=complex_st, z2=complex_st,
       m=st.sampled_from([0.1, 0.3, 0.5, 0.7, 0.9]))
def test_holder_ratio_bounded(z1, z2, m):
    assert holder_nonlinearity_ratio(z1, z2, m) <= 5.0


def test_holder_ratio_oracles():
    assert holder_nonlinearity_ratio(1.0, -1.0, 0.5) == pytest.approx(
        math.sqrt(2.0), rel=1e-14)
    assert holder_nonlinearity_ratio(2.0, 2.0, 0.5) == 0.0


def test_sample_complex_pairs_ranges():
    rng = np.random.default_rng(0)
    z1, z2 = sample_complex_pairs(rng, 1000)
    assert z1.shape == z2.shape == (1000,)
    mods = np.concatenate([np.abs(z1), np.abs(z2)])
    assert mods.min() >= 1e-6 * 0.99
    assert mods.max() <= 1e6 * 1.01


def test_random_field_boundary_behavior():
    rng = np.random.default_rng(3)
    ball = build_mesh(RadialDomain(1, 0.0, 1.0), 65)
    u = random_field(ball, rng)
    assert abs(u.values[-1]) < 1e-12
    assert abs(u.values[0]) > 0.0
    ann = build_mesh(RadialDomain(2, 0.5, 1.5), 65)
    v = random_field(ann, rng)
    assert abs(v.values[0]) < 1e-12
    assert abs(v.values[-1]) < 1e-12


def test_check_gn_returns_moderate_ratios():
    rng = np.random.default_rng(7)
    mesh = build_mesh(RadialDomain(2, 0.0, 1.0), 129)
    u = random_field(mesh, rng)
    out = check_gn(u, 0.5)
    assert set(out) == {"ratio_a", "ratio_b"}
    assert 0.0 < out["ratio_a"] < 5.0
    assert 0.0 < out["ratio_b"] < 5.0


def test_check_interp_trace_positive():
    rng = np.random.default_rng(11)
    mesh = build_mesh(RadialDomain(1, 0.0, 1.0), 129)
    u = random_field(mesh, rng)
    ratio = check_interp_trace(u, 0.5, 0.5)
    assert 0.0 < ratio < 5.0


def test_estimate_constant_margins():
    est = estimate_constant("gn", n=120, seed=1)
    assert est["constant"] == pytest.approx(est["extreme"] * 1.1, rel=1e-12)
    est = estimate_constant("mono", n=500, seed=1)
    assert est["constant"] == pytest.approx(est["extreme"] / 1.1, rel=1e-12)
    with pytest.raises(ValueError):
        estimate_constant("gn", n=50)
    with pytest.raises(ValueError):
        estimate_constant("nope", n=200)


def test_run_suite_all_pass():
    reports = run_suite(samples=20000, seed=5)
    assert [r.name for r in reports] == ["young", "gn", "trace", "mono",
                                         "holder"]
    for rep in reports:
        assert isinstance(rep, IneqReport)
        assert rep.passed, f"{rep.name} failed with worst={rep.worst}"
    young = reports[0]
    assert young.worst >= 0.0
    mono = next(r for r in reports if r.name == "mono")
    assert mono.worst >= -1e-12
    holder = next(r for r in reports if r.name == "holder")
    assert holder.worst <= 5.0
    with pytest.raises(ValueError):
        run_suite(which="unknown")


def test_run_suite_single_selector():
    (rep,) = run_suite(which="young", samples=5000, seed=9)
    assert rep.name == "young"
    assert rep.samples == 5000
