import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_loop, random_path, random_sp2, sampled_path
from reeblift import RadialHamiltonian
from reeblift.errors import NonConvergence, RefinementNeeded
from reeblift.sp2_index import (
    IndexInterval,
    SymplecticPath,
    cz_index,
    interval_index,
    maslov_of_loop,
    mean_index,
    rotation_interval,
    rotation_matrix,
    winding,
)


def identity_path(n=8):
    return SymplecticPath(np.linspace(0, 1, n + 1), np.broadcast_to(np.eye(2), (n + 1, 2, 2)).copy())


def shear_path(n=256):
    return SymplecticPath.from_function(lambda t: np.array([[1.0, t], [0.0, 1.0]]), n)


# interval index -------------------------------------------------------------


@pytest.mark.parametrize("lo, hi, expected", [
    (0.2, 0.4, 1), (0.0, 0.0, -1), (-0.1, 0.1, 0), (1.0, 1.0, 1), (0.5, 1.0, 1),
    (1.0, 1.3, 2), (-0.3, 0.0, -1), (2.7, 3.2, 6),
])
def test_interval_index_table(lo, hi, expected):
    assert interval_index(lo, hi) == expected


def test_interval_index_rejects_long_intervals():
    with pytest.raises(ValueError):
        interval_index(0.0, 1.0)
    with pytest.raises(ValueError):
        IndexInterval(0.5, 0.2)


@given(st.floats(-50, 50, allow_nan=False))
def test_singleton_formula(a):
    assert interval_index(a) == 2 * math.ceil(a) - 1


@given(st.integers(-20, 20))
def test_singleton_integers(k):
    assert interval_index(float(k)) == 2 * k - 1


@settings(max_examples=200)
@given(st.floats(-10, 10, allow_nan=False), st.floats(0.0, 0.9))
def test_lower_semicontinuity(a, width):
    b = a + width
    assert interval_index(a - 1e-6, b - 1e-6) <= interval_index(a, b)


# windings and rotation intervals ---------------------------------------------


def test_identity_path():
    path = identity_path()
    assert winding(path, [1.0, 0.0]) == 0.0
    assert cz_index(path) == -1


def test_full_rotation():
    path = SymplecticPath.rotation(1.0)
    for ang in np.linspace(0, math.pi, 7):
        assert winding(path, [math.cos(ang), math.sin(ang)]) == pytest.approx(1.0, abs=1e-14)
    assert cz_index(path) == 1


@pytest.mark.parametrize("turns", [0.3, -0.7, 2.25, 3.0])
def test_rotation_interval_of_rotation(turns):
    iv = rotation_interval(SymplecticPath.rotation(turns))
    assert iv.lo == pytest.approx(turns, abs=1e-12)
    assert iv.hi == pytest.approx(turns, abs=1e-12)


@pytest.mark.parametrize("m", [1, 2, 5])
def test_radial_rotation_winding(m):
    # restricted to a circle, the radial flow rotates by -2 h' t with h' = -pi m
    path = SymplecticPath.from_function(lambda t: rotation_matrix(2 * math.pi * m * t), 64 * m)
    assert winding(path, [0.6, 0.8]) == pytest.approx(m, abs=1e-12)


def test_shear_interval_matches_brute_force():
    path = shear_path()
    iv = rotation_interval(path)
    # brute force over 1024 directions
    angles = np.arange(1024) * (math.pi / 1024)
    brute = [winding(path, [math.cos(a), math.sin(a)]) for a in angles]
    assert iv.lo == pytest.approx(min(brute), abs=1e-5)
    assert iv.hi == pytest.approx(max(brute), abs=1e-9)
    # the extreme direction has closed form (pi - 2 atan 2) / (2 pi) of turning
    assert iv.lo == pytest.approx(-(math.pi - 2 * math.atan(2.0)) / (2 * math.pi), abs=1e-9)
    assert iv.hi == pytest.approx(0.0, abs=1e-12)
    assert cz_index(path) == -1


def test_refinement_needed_on_coarse_sampling():
    path = SymplecticPath.rotation(3.0, n_samples=8)
    with pytest.raises(RefinementNeeded) as err:
        winding(path, [1.0, 0.0])
    assert err.value.t_hi > err.value.t_lo


def test_winding_invariant_under_refinement(rng):
    func = random_path(rng)
    path = sampled_path(func)
    fine = path.refined()
    for ang in np.linspace(0, math.pi, 9):
        u = [math.cos(ang), math.sin(ang)]
        assert abs(winding(fine, u) - winding(path, u)) < 1e-12


def test_invalid_paths_rejected():
    with pytest.raises(ValueError):
        SymplecticPath([0.0, 1.0], [np.eye(2), 2 * np.eye(2)])
    with pytest.raises(ValueError):
        SymplecticPath([0.0, 0.5], [np.eye(2), np.eye(2)])
    with pytest.raises(ValueError):
        SymplecticPath([0.0, 1.0], [rotation_matrix(0.1), np.eye(2)])


@pytest.mark.parametrize("n, k", [(2, 1), (2, 3), (3, 4), (3, 7), (4, 9)])
def test_origin_index_of_rotation_sector(n, k):
    h = RadialHamiltonian.rotation_sector(n, 0.1)
    path = SymplecticPath.from_function(lambda t: h.dflow_matrix(k * t, 0.0), 64 * k)
    assert cz_index(path) == 2 * math.ceil(k / n) - 1


def test_twisted_circle_interval():
    # h'' < 0 on the band of a negative twist: interval starts at m and enters (m, m + 1)
    h = RadialHamiltonian(-2.5 * math.pi, 1.0, RadialHamiltonian.rotation_sector(2, 0.2).profile)
    k = 2
    circle = h.fixed_point_radii(k).circles[0]
    z0 = math.sqrt(circle.s)
    path = SymplecticPath.from_function(lambda t: h.dflow_matrix(k * t, z0), 512)
    iv = rotation_interval(path)
    assert h.curvature_sign(circle.s) < 0
    assert iv.lo == pytest.approx(circle.m, abs=1e-9)
    assert circle.m < iv.hi < circle.m + 1


# Maslov index ---------------------------------------------------------------


def test_maslov_examples():
    assert maslov_of_loop(identity_path()) == 0
    assert maslov_of_loop(SymplecticPath.rotation(1.0)) == 1
    for k in (1, 2, 3):
        # -exp(4 pi i k t) starts at -1; shifting by the half turn gives a loop at the identity
        loop = SymplecticPath.rotation(2.0 * k, n_samples=64 * k)
        assert maslov_of_loop(loop) == 2 * k


def test_maslov_rejects_open_paths():
    with pytest.raises(ValueError):
        maslov_of_loop(SymplecticPath.rotation(0.5))


def test_maslov_additive(rng):
    a = sampled_path(random_loop(rng, 2))
    b = sampled_path(random_loop(rng, -3))
    assert maslov_of_loop(a.concatenate(b)) == maslov_of_loop(a) + maslov_of_loop(b) == -1


# mean index -----------------------------------------------------------------


@pytest.mark.parametrize("a", [0.3, -1.2, 0.8])
def test_mean_index_of_rotation(a):
    est = mean_index(lambda k: SymplecticPath.rotation(k * a), k_max=64)
    assert est.value == pytest.approx(2 * a, abs=1e-9)
    assert est.error < 1e-9


def test_mean_index_of_outside_circle():
    n, delta = 3, 0.2
    h = RadialHamiltonian.rotation_sector(n, delta)
    s = h.profile.band_point(0.4)
    c = -float(h.profile.d1(s))
    z0 = math.sqrt(s)
    est = mean_index(lambda k: SymplecticPath.from_function(lambda t: h.dflow_matrix(k * t, z0), 32 * k),
                     k_max=64)
    assert est.value == pytest.approx(2 * c / n, abs=0.02)


def test_mean_index_at_twist_center():
    theta = -1.9
    h = RadialHamiltonian.negative_twist(0.4, theta, 0.1)
    est = mean_index(lambda k: SymplecticPath.from_function(lambda t: h.dflow_matrix(k * t, 0.0), 32 * k),
                     k_max=64)
    assert est.value == pytest.approx(2 * theta, abs=1e-9)


def test_mean_index_nonconvergence():
    def erratic(k):
        return SymplecticPath.rotation(k * 0.25 + (3.0 if k == 64 else 0.0))

    with pytest.raises(NonConvergence):
        mean_index(erratic, k_max=64)
    with pytest.raises(ValueError):
        mean_index(erratic, k_max=4)


# index axioms -------------------------------------------------------------------


def test_conjugation_by_constant(rng):
    path = sampled_path(random_path(rng), n_samples=4096)
    a = random_sp2(rng)
    assert cz_index(path.conjugate(a)) == cz_index(path)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(-3, 3))
def test_loop_shift_property(seed, m):
    rng = np.random.default_rng(seed)
    phi, psi = random_path(rng), random_loop(rng, m)
    base = cz_index(sampled_path(phi))
    shifted = cz_index(sampled_path(lambda t: psi(t) @ phi(t)))
    assert shifted == base + 2 * m
