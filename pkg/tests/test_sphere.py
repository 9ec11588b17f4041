import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reeblift import (ConstructionParams, OrbitKind, calabi_phi, check_dynamical_convexity,
                      contact_report, enumerate_orbit_classes, invariants_sS, lift_class,
                      systolic_ratio, t_min, volume)
from reeblift.sphere import lift_binding, reference_ledger, rescaled_invariants, theorem_ledger


@pytest.fixture(scope="module")
def p2(selected_params):
    return selected_params[(2, 0.5)]


@pytest.fixture(scope="module")
def p3(selected_params):
    return selected_params[(3, 0.25)]


@pytest.fixture(scope="module")
def rep3(p3):
    return contact_report(p3)


def test_binding_lift():
    for k in range(1, 6):
        b = lift_binding(k)
        assert b.T == k * math.pi and b.mu_s3 == 4 * k - 1 and b.rho_bar == 2 / math.pi


def test_lift_formulas(p3):
    for k in (1, 3, 6):
        for c in enumerate_orbit_classes(p3, k):
            o = lift_class(p3, c)
            assert o.T == k * (math.pi + c.sigma)
            assert o.mu_s3 == c.mu + 4 * k
            assert o.rho_bar == pytest.approx((2 + c.mu_mean_per_k / 2) / (math.pi + c.sigma), rel=1e-15)


def test_mean_rotation_is_half_mean_index_per_period(p3):
    # rho = mean index / (2 T) with mean index of the lift = k (mean_per_k + 4)
    for c in enumerate_orbit_classes(p3, 6):
        o = lift_class(p3, c)
        assert o.rho_bar == pytest.approx(6 * (c.mu_mean_per_k + 4) / (2 * o.T), rel=1e-14)


def test_volume_and_ratio(p2):
    assert volume(p2) == pytest.approx(math.pi**2 + calabi_phi(p2), rel=1e-15)
    tm = t_min(p2)
    assert tm.value == math.pi and tm.certified
    assert systolic_ratio(p2) == pytest.approx(math.pi**2 / volume(p2), rel=1e-15)


def test_periods_exceed_pi(p3):
    # every non-binding orbit of minimal period k is longer than pi
    for k in range(1, 25):
        for c in enumerate_orbit_classes(p3, k):
            if c.minimal_period == k:
                assert lift_class(p3, c).T >= math.pi


def test_extrema_bracket_enumerated_classes(p3, rep3):
    ext = rep3.extrema
    assert ext.inf <= ext.truncated_inf + 1e-12
    assert ext.sup >= ext.truncated_sup - 1e-12
    assert ext.sup == pytest.approx(2 / math.pi, abs=1e-15)


def test_s_near_limit_for_n3(rep3):
    assert -2 < rep3.s < -1.75
    assert rep3.S == pytest.approx(2.0, abs=1e-12)


def test_convexity_witnesses(p2, p3):
    dc2 = check_dynamical_convexity(p2)
    assert dc2.dynamically_convex and dc2.witness.mu_s3 == 3 and dc2.negative_index_witness is None
    dc3 = check_dynamical_convexity(p3)
    assert not dc3.dynamically_convex
    w = dc3.negative_index_witness
    assert w.mu_s3 < 0 and w.source.kind is OrbitKind.INSIDE_CENTER and w.k == 3


def test_reference_sphere():
    p = ConstructionParams.reference(2)
    rep = contact_report(p)
    assert (rep.t_min, rep.volume, rep.rho_sys, rep.s, rep.S, rep.Delta) == (
        math.pi, math.pi**2, 1.0, 2.0, 2.0, 0.0)
    assert all(e.passed for e in reference_ledger(rep, 16))


def test_theorem_ledger_clauses(rep3):
    led = theorem_ledger(3, 0.25, rep3)
    assert all(e.passed for e in led), [e for e in led if not e.passed]
    assert led[-1].clause == "orbit with negative index exists"


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 10.0))
def test_scale_invariance(c):
    p = ConstructionParams.reference(2)
    rep = contact_report(p, k_max=4)
    rho, s, S = rescaled_invariants(rep, c)
    assert rho == pytest.approx(rep.rho_sys, rel=1e-14)
    assert s == pytest.approx(rep.s, rel=1e-14)
    assert S == pytest.approx(rep.S, rel=1e-14)


def test_rescale_rejects_nonpositive(rep3):
    with pytest.raises(ValueError):
        rescaled_invariants(rep3, 0.0)


def test_invariants_converge_in_kmax(p2):
    s16, S16, _, _ = invariants_sS(p2, 16)
    s32, S32, _, _ = invariants_sS(p2, 32)
    assert s16 == s32 and S16 == S32
