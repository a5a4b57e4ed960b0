"""Phase-transition exponents, critical ratios, and robustness bounds.

Golden values were frozen from an independent high-precision oracle
(tools/regenerate_goldens.py); the grid-plus-refinement solver must land on
them within its stated bisection tolerance.
"""
import math

import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from rewl1 import (
    RobustnessProfile,
    ThresholdQuery,
    constant_robustness_profile,
    delta_c,
    delta_c_details,
    exponent_breakdown,
    psi_com,
    psi_ext,
    psi_int,
    theorem3_check,
    threshold_csv_text,
    weak_threshold,
    zeta_bound,
)

GOLDEN_QUERY = ThresholdQuery(0.3, 0.7, 0.8, 0.1, 3.0)
MU_W_0555 = 0.22974545659811156  # frozen oracle value of mu_W(0.555)


# ---------------------------------------------------------------------------
# query validation
# ---------------------------------------------------------------------------

def test_query_validation():
    with pytest.raises(ValueError):
        ThresholdQuery(0.0, 1.0, 0.5, 0.5, 2.0)  # gamma1 must be interior
    with pytest.raises(ValueError):
        ThresholdQuery(0.4, 0.7, 0.5, 0.5, 2.0)  # fractions must sum to 1
    with pytest.raises(ValueError):
        ThresholdQuery(0.5, 0.5, 1.2, 0.0, 2.0)  # f1 out of range
    with pytest.raises(ValueError):
        ThresholdQuery(0.5, 0.5, 0.5, 0.5, 0.9)  # omega below 1
    with pytest.raises(ValueError):
        ThresholdQuery(0.5, 0.5, 0.0, 0.0, 2.0)  # zero total sparsity
    with pytest.raises(ValueError):
        ThresholdQuery(0.5, 0.5, 1.0, 1.0, 2.0)  # full support, no slack
    q = GOLDEN_QUERY
    assert q.sparsity == pytest.approx(0.3 * 0.8 + 0.7 * 0.1)
    assert q.tau1_max == pytest.approx(0.3 * 0.2)
    assert q.tau2_max == pytest.approx(0.7 * 0.9)


def test_tau_validation():
    with pytest.raises(ValueError):
        psi_com(GOLDEN_QUERY, -0.01, 0.1)
    with pytest.raises(ValueError):
        psi_com(GOLDEN_QUERY, 0.1, 0.1)  # tau1 above gamma1*(1-f1)
    with pytest.raises(ValueError):
        psi_int(GOLDEN_QUERY, 0.01, 0.7)  # tau2 above gamma2*(1-f2)


# ---------------------------------------------------------------------------
# exponent goldens and identities
# ---------------------------------------------------------------------------

def test_psi_com_golden():
    assert psi_com(GOLDEN_QUERY, 0.03, 0.2) == pytest.approx(
        0.97240386396548982, abs=1e-9
    )


def test_psi_int_golden():
    assert psi_int(GOLDEN_QUERY, 0.02, 0.3) == pytest.approx(
        0.38684324576991726, abs=1e-9
    )


def test_psi_ext_golden():
    assert psi_ext(GOLDEN_QUERY, 0.02, 0.3) == pytest.approx(
        0.37006666177994539, abs=1e-9
    )


def test_exponent_endpoint_identities():
    q = GOLDEN_QUERY
    # no misplaced mass: the internal angle contributes nothing
    assert psi_int(q, 0.0, 0.0) == 0.0
    # saturated taus: both aperture coefficients vanish
    assert psi_ext(q, q.tau1_max, q.tau2_max) == 0.0


def test_breakdown_is_consistent_and_solves_its_equations():
    q = GOLDEN_QUERY
    bd = exponent_breakdown(q, 0.02, 0.3)
    assert bd.gap == pytest.approx(bd.psi_com - bd.psi_int - bd.psi_ext,
                                   abs=1e-12)
    inner = bd.intermediates

    # external angle: x0 must satisfy 2c*x0 = g(x0)*a1/G(x0) + w*g(w*x0)*a2/G(w*x0)
    w = q.omega
    g = lambda x: (2.0 / math.sqrt(math.pi)) * math.exp(-x * x)
    G = sp.erf
    residual = (
        2.0 * inner.c * inner.x0
        - g(inner.x0) * inner.alpha1 / G(inner.x0)
        - w * g(w * inner.x0) * inner.alpha2 / G(w * inner.x0)
    )
    assert residual == pytest.approx(0.0, abs=1e-9)

    # internal angle: s* solves -s/Q(s) = t/(t*b + Omega'), and y = s*b + Q(s*)
    t1, t2 = 0.02, 0.3
    t = t1 + t2
    mills = lambda s: math.sqrt(2.0 / math.pi) / sp.erfcx(-s / math.sqrt(2.0))
    q_star = (t1 * mills(inner.s_star) + w * t2 * mills(w * inner.s_star)) / t
    target = t / (t * inner.b + inner.omega_prime)
    assert -inner.s_star / q_star == pytest.approx(target, abs=1e-9)
    assert inner.y_point == pytest.approx(inner.s_star * inner.b + q_star,
                                          abs=1e-12)
    assert inner.b == pytest.approx((t1 + w * w * t2) / t, abs=1e-12)
    assert inner.omega_prime == pytest.approx(
        q.gamma1 * q.f1 + w * w * q.gamma2 * q.f2, abs=1e-12
    )


@settings(max_examples=25)
@given(
    gamma1=st.floats(min_value=0.15, max_value=0.85),
    f1=st.floats(min_value=0.05, max_value=0.95),
    f2=st.floats(min_value=0.05, max_value=0.95),
    omega=st.floats(min_value=1.0, max_value=8.0),
    u1=st.floats(min_value=0.0, max_value=1.0),
    u2=st.floats(min_value=0.0, max_value=1.0),
)
def test_exponents_nonnegative_and_gap_bounded(gamma1, f1, f2, omega, u1, u2):
    q = ThresholdQuery(gamma1, 1.0 - gamma1, f1, f2, omega)
    t1 = u1 * q.tau1_max
    t2 = u2 * q.tau2_max
    bd = exponent_breakdown(q, t1, t2)
    assert bd.psi_com >= -1e-12
    assert bd.psi_int >= -1e-12
    assert bd.psi_ext >= -1e-12
    assert bd.gap <= bd.psi_com + 1e-12


@settings(max_examples=25)
@given(
    gamma1=st.floats(min_value=0.2, max_value=0.8),
    f1=st.floats(min_value=0.05, max_value=0.95),
    f2=st.floats(min_value=0.05, max_value=0.95),
    u1=st.floats(min_value=0.0, max_value=1.0),
    u2=st.floats(min_value=0.0, max_value=1.0),
)
def test_class_swap_symmetry_at_omega_one(gamma1, f1, f2, u1, u2):
    # with omega = 1 the class labels are arbitrary, so swapping
    # (gamma1, f1, tau1) with (gamma2, f2, tau2) cannot change any exponent
    q = ThresholdQuery(gamma1, 1.0 - gamma1, f1, f2, 1.0)
    qs = ThresholdQuery(1.0 - gamma1, gamma1, f2, f1, 1.0)
    t1 = u1 * q.tau1_max
    t2 = u2 * q.tau2_max
    a = exponent_breakdown(q, t1, t2)
    b = exponent_breakdown(qs, t2, t1)
    assert a.psi_com == pytest.approx(b.psi_com, abs=1e-10)
    assert a.psi_int == pytest.approx(b.psi_int, abs=1e-10)
    assert a.psi_ext == pytest.approx(b.psi_ext, abs=1e-10)


# ---------------------------------------------------------------------------
# delta_c
# ---------------------------------------------------------------------------

def test_delta_c_weighted_goldens():
    mu = MU_W_0555
    for omega, want in [(2.0, 0.38465935106296896), (5.0, 0.27479963347204027)]:
        q = ThresholdQuery(mu, 1.0 - mu, 1.0, 0.0, omega)
        assert delta_c(q) == pytest.approx(want, abs=2e-4)


def test_delta_c_round_trip_at_omega_one():
    q = ThresholdQuery(MU_W_0555, 1.0 - MU_W_0555, 1.0, 0.0, 1.0)
    assert delta_c(q) == pytest.approx(0.555, abs=2e-4)


def test_delta_c_details_fields():
    q = ThresholdQuery(MU_W_0555, 1.0 - MU_W_0555, 1.0, 0.0, 2.0)
    res = delta_c_details(q, 150, 1e-4)
    assert not res.saturated
    assert q.sparsity < res.value < 1.0
    assert np.isfinite(res.peak_tau1) and np.isfinite(res.peak_tau2)
    # the unconstrained gap maximum is tangent to zero; the refined peak
    # must reproduce that to far better than the strictness margin
    assert abs(res.peak_gap) < 1e-8


def test_delta_c_monotone_in_omega():
    values = [
        delta_c(ThresholdQuery(0.23, 0.77, 1.0, 0.0, omega), 150)
        for omega in (1.0, 2.0, 5.0)
    ]
    assert values[0] > values[1] > values[2]


def test_delta_c_monotone_in_f2():
    values = [
        delta_c(ThresholdQuery(0.3, 0.7, 0.2, f2, 3.0), 150)
        for f2 in (0.02, 0.08, 0.15)
    ]
    assert values[0] < values[1] < values[2]


def test_delta_c_partition_invariance_quick():
    # At omega = 1 the two classes receive identical weight, so any split of
    # a uniformly sparse signal's coordinates (density f on both classes, any
    # class-size fraction gamma1) must yield the same threshold.
    density = 0.12
    baseline = None
    for gamma1 in (0.4, 0.6):
        value = delta_c(ThresholdQuery(gamma1, 1.0 - gamma1, density, density, 1.0))
        baseline = value if baseline is None else baseline
        assert value == pytest.approx(baseline, abs=2e-4)


def test_delta_c_saturation_warns():
    q = ThresholdQuery(0.5, 0.5, 0.7, 0.1, 3.0)
    with pytest.warns(RuntimeWarning):
        res = delta_c_details(q, 150, 1e-4)
    assert res.saturated
    assert res.value == 1.0


def test_delta_c_grid_validation():
    q = GOLDEN_QUERY
    with pytest.raises(ValueError):
        delta_c(q, 50)
    with pytest.raises(ValueError):
        delta_c(q, 150.5)


# ---------------------------------------------------------------------------
# weak_threshold / theorem3_check
# ---------------------------------------------------------------------------

def test_weak_threshold_goldens():
    assert weak_threshold(0.3) == pytest.approx(0.087235310469723117, abs=3e-4)
    assert weak_threshold(0.8) == pytest.approx(0.45865065390827112, abs=3e-4)


def test_weak_threshold_monotone():
    assert weak_threshold(0.3) < weak_threshold(0.5555) < weak_threshold(0.8)


def test_weak_threshold_domain():
    with pytest.raises(ValueError):
        weak_threshold(0.0)
    with pytest.raises(ValueError):
        weak_threshold(1.0)


def test_theorem3_margin_golden():
    res = theorem3_check(0.555, 2.0)
    assert res.passed
    assert res.margin == pytest.approx(0.17034064893703104, abs=5e-4)
    assert res.mu_weak == pytest.approx(MU_W_0555, abs=3e-4)
    assert res.delta_c_value == pytest.approx(0.38465935106296896, abs=5e-4)


def test_theorem3_degenerate_at_omega_one():
    # omega = 1 changes nothing, so the margin collapses to bisection noise
    res = theorem3_check(0.555, 1.0)
    assert abs(res.margin) <= 5e-4


# ---------------------------------------------------------------------------
# zeta_bound and robustness profiles
# ---------------------------------------------------------------------------

def test_zeta_bound_golden():
    profile = constant_robustness_profile()
    res = zeta_bound(0.1, profile)
    assert res.zeta == pytest.approx(0.062914402768419592, abs=1e-12)
    assert res.overlap_lower_bound == pytest.approx(
        0.71847217091297969, abs=1e-12
    )


def test_zeta_monotone_in_eps0():
    profile = constant_robustness_profile()
    zetas = [zeta_bound(e, profile).zeta for e in (0.05, 0.1, 0.2)]
    overlaps = [zeta_bound(e, profile).overlap_lower_bound
                for e in (0.05, 0.1, 0.2)]
    assert zetas[0] < zetas[1] < zetas[2]
    assert overlaps[0] > overlaps[1] > overlaps[2]


def test_zeta_requires_c_above_one():
    profile = constant_robustness_profile(c_value=1.0)
    with pytest.raises(ValueError):
        zeta_bound(0.1, profile)


def test_zeta_saturates_to_zero_overlap():
    # a barely-robust profile blows the error bound past 1, where the
    # overlap guarantee degenerates to the trivial zero
    profile = constant_robustness_profile(c_value=1.0 + 1e-6)
    res = zeta_bound(0.3, profile)
    assert res.zeta >= 1.0
    assert res.overlap_lower_bound == 0.0


def test_robustness_profile_validation():
    with pytest.raises(ValueError):
        RobustnessProfile(lambda e: 2.0, -0.5, np.array([0.1]))
    with pytest.raises(ValueError):
        RobustnessProfile(lambda e: 2.0, 1.0, np.array([]))
    with pytest.raises(ValueError):
        RobustnessProfile(lambda e: 2.0, 1.0, np.array([0.0, 0.5]))


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

def test_threshold_csv_text_format():
    q = ThresholdQuery(0.25, 0.75, 1.0, 0.0, 2.0)
    text = threshold_csv_text([(q, 0.38465935106296896)])
    lines = text.strip().split("\n")
    assert lines[0] == "gamma1,f1,f2,omega,delta_c"
    assert lines[1] == "0.25,1,0,2,0.384659351063"
    # determinism: same entries, same bytes
    assert text == threshold_csv_text([(q, 0.38465935106296896)])
