import math
from fractions import Fraction

import numpy as np
import pytest

from reeblift import (ConstructionParams, OrbitKind, action_sigma, calabi_phi, cz_class,
                      enumerate_orbit_classes, mean_cz_class, select_params, verify_mapn)
from reeblift.disk import initial_nu
from reeblift.errors import ParameterSearchError


@pytest.fixture(scope="module")
def p2(selected_params):
    return selected_params[(2, 0.5)]


@pytest.fixture(scope="module")
def p3(selected_params):
    return selected_params[(3, 0.25)]


def kinds(classes):
    return {c.kind for c in classes}


def test_params_invariants(p2, p3):
    for p in (p2, p3):
        n = p.n
        assert -n < p.theta < -n + 1 and p.theta < -n + p.eps
        assert 0 < p.nu < p.eps
        assert math.pi * p.R**2 == pytest.approx(p.eta * math.pi / n, rel=1e-15)
        assert p.eta < 1 - 2 * p.delta
        p.validate()


def test_search_strategy(p2):
    assert p2.theta == -2 + initial_nu(2, 0.5)
    assert p2.nu == pytest.approx(0.025)
    j = round(-math.log2(1 - p2.eta))
    assert p2.delta == 2.0 ** -(j + 3)


def test_large_eps_keeps_theta_in_range():
    p = select_params(2, 3.0)
    assert -2 < p.theta < -1


def test_search_failure_names_statement():
    with pytest.raises(ParameterSearchError) as err:
        select_params(2, 0.5, max_depth=2)
    assert err.value.failing


def test_validate_names_first_failure():
    p = ConstructionParams(2, 0.5, -1.975, 0.99, 0.4)
    with pytest.raises(ValueError, match="eta < 1 - 2 delta"):
        p.validate()


def test_constructor_rejects_out_of_range():
    with pytest.raises(ValueError):
        ConstructionParams(1, 0.5, -0.9, 0.5, 0.1)
    with pytest.raises(ValueError):
        ConstructionParams(2, 0.5, -1.9, 1.0, 0.1)
    with pytest.raises(ValueError):
        ConstructionParams(2, 0.5, -1.9, 0.5, 0.5)


def test_k1_classes(p2, p3):
    for p in (p2, p3):
        cs = enumerate_orbit_classes(p, 1)
        assert kinds(cs) == {OrbitKind.OUTSIDE_ORIGIN, OrbitKind.OUTSIDE_EXTERIOR}


def test_inside_classes_only_at_multiples_of_n(p3):
    for k in range(1, 13):
        inside = [c for c in enumerate_orbit_classes(p3, k) if c.kind.inside]
        assert bool(inside) == (k % 3 == 0)
    assert OrbitKind.INSIDE_CENTER in kinds(enumerate_orbit_classes(p3, 3))


def test_action_examples(p2):
    n, d = p2.n, p2.delta
    cs = {c.kind: c for c in enumerate_orbit_classes(p2, n)}
    assert cs[OrbitKind.OUTSIDE_EXTERIOR].sigma == 0.0
    assert cs[OrbitKind.OUTSIDE_PLATEAU].sigma == pytest.approx(math.pi / n * (1 - d), rel=1e-15)
    center = cs[OrbitKind.INSIDE_CENTER]
    assert center.sigma == pytest.approx(math.pi / n * (1 - d) * (1 + p2.eta * p2.theta), rel=1e-13)
    assert action_sigma(p2, center) == center.sigma


def test_index_examples(p3):
    n = p3.n
    for k in range(1, 10):
        cs = {c.kind: c for c in enumerate_orbit_classes(p3, k)}
        assert cs[OrbitKind.OUTSIDE_ORIGIN].mu == 2 * math.ceil(k / n) - 1
        assert cs[OrbitKind.OUTSIDE_EXTERIOR].mu == -1
    center = next(c for c in enumerate_orbit_classes(p3, n) if c.kind is OrbitKind.INSIDE_CENTER)
    assert center.mu == 2 + 2 * math.ceil(n * p3.theta) - 1
    assert cz_class(p3, center) == center.mu
    with pytest.raises(ValueError):
        cz_class(p3, center, k=n + 1)


def test_mean_index_examples(p2):
    n = p2.n
    cs = {c.kind: c for c in enumerate_orbit_classes(p2, n)}
    assert cs[OrbitKind.OUTSIDE_PLATEAU].mu_mean_per_k == pytest.approx(2 / n)
    assert cs[OrbitKind.OUTSIDE_EXTERIOR].mu_mean_per_k == 0.0
    center = cs[OrbitKind.INSIDE_CENTER]
    assert mean_cz_class(p2, center) == pytest.approx(2 / n - 2 * n + 2 * p2.nu, abs=1e-13)


def test_calabi_window(p2, p3):
    for p in (p2, p3):
        target = -math.pi**2 * (1 - 1 / p.n)
        assert target < calabi_phi(p) < target + p.eps
    no_twist = ConstructionParams(2, 0.5, p2.theta, p2.eta, p2.delta, mode="no_kappa")
    assert 0 < calabi_phi(no_twist) < math.pi**2 / 2


def test_minimal_periods(p3):
    for k in range(1, 25):
        for c in enumerate_orbit_classes(p3, k):
            assert k % c.minimal_period == 0
            if c.minimal_period > 1:
                assert c.minimal_period >= p3.n


def test_classes_are_fixed_points(p3):
    # every outside circle really is fixed by the k-th iterate of the rotating map
    hp = p3.h_plus
    for k in range(1, 25):
        for c in enumerate_orbit_classes(p3, k):
            if c.kind is OrbitKind.OUTSIDE_CIRCLE:
                z = math.sqrt(c.s) * np.exp(0.3j)
                assert abs(complex(hp.flow(k, z)) - z) < 1e-6


def test_verify_mapn_passes(p2):
    rep = verify_mapn(p2)
    assert rep.passed, rep.first_failure()
    assert [st.label for st in rep.statements] == ["i", "ii", "iii", "iv", "v", "vi", "vii", "viii"]
    assert rep.violated_invariants == []


def test_verify_mapn_forced_failure():
    rep = verify_mapn(ConstructionParams(2, 0.5, -1.975, 0.99, 0.4))
    assert not rep.passed
    assert rep.violated_invariants == ["eta < 1 - 2 delta"]
    failing = {st.label for st in rep.statements if not st.passed}
    assert failing & {"vii", "viii"}


def test_witness_exact(p3):
    center = next(c for c in enumerate_orbit_classes(p3, 3) if c.kind is OrbitKind.INSIDE_CENTER)
    exact = Fraction(2, 3) - 6 + 2 * Fraction(p3.nu)
    assert abs(Fraction(center.mu_mean_per_k) - exact) < Fraction(1, 10**12)
    bound = -math.pi + math.pi / 3 * (1 + p3.nu) + p3.nu
    assert center.sigma <= bound
