import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reeblift import CutoffProfile, RadialHamiltonian, SymplecticPath, cz_index
from reeblift.radial import inverse_smooth_step, snap_integer, snapped_ceil
from reeblift.cutoff import smooth_step


@pytest.fixture
def hp():
    return RadialHamiltonian.rotation_sector(3, 0.1)


def test_rotation_sector_on_plateau(hp):
    # rotation by 2 pi / n near the origin
    z = 0.3 + 0.2j
    assert complex(hp.flow(1.0, z)) == pytest.approx(np.exp(2j * math.pi / 3) * z, abs=1e-15)
    assert float(hp.value(0.0)) == pytest.approx(math.pi / 3 * 0.9, abs=1e-15)


def test_flow_outside_support_is_identity(hp):
    z = 1.1 - 0.4j
    assert complex(hp.flow(7.0, z)) == z


def test_flow_group_property(hp):
    z = np.sqrt(np.linspace(0, 1.1, 50)) * np.exp(1j * np.linspace(0, 6, 50))
    assert np.allclose(hp.flow(0.7, hp.flow(0.6, z)), hp.flow(1.3, z), atol=1e-15)


def test_dflow_against_differences(hp):
    z0 = complex(math.sqrt(hp.profile.band_point(0.37)), 0.1)
    h = 1e-7
    for u in (1.0, 1j, 0.6 - 0.8j):
        fd = (hp.flow(1.0, z0 + h * u) - hp.flow(1.0, z0 - h * u)) / (2 * h)
        assert complex(hp.dflow(1.0, z0, u)) == pytest.approx(complex(fd), abs=1e-6)
    assert np.linalg.det(hp.dflow_matrix(2.3, z0)) == pytest.approx(1.0, abs=1e-12)


def test_action_formula(hp):
    s = np.linspace(0, 1.2, 101)
    expected = hp.value(s) - s * hp.d1(s)
    assert np.array_equal(hp.action_at(s), expected)
    assert float(hp.action(0.0)) == pytest.approx(math.pi / 3 * 0.9)
    assert float(hp.action(1.2)) == 0.0


@pytest.mark.parametrize("n, delta", [(2, 0.2), (3, 0.05), (5, 0.01)])
def test_calabi_closed_form(n, delta):
    # 4 pi int r h(r^2) dr = 2 pi int h(s) ds = 2 pi^2 / n * int chi
    h = RadialHamiltonian.rotation_sector(n, delta)
    assert h.calabi() == pytest.approx(2 * math.pi**2 / n * h.profile.integral(), rel=1e-12)
    assert h.calabi() < math.pi**2 / n


def test_zero_hamiltonian():
    h = RadialHamiltonian.zero()
    assert h.is_zero and h.calabi() == 0.0
    fixed = h.fixed_point_radii(3)
    assert fixed.bands[0].lo == 0.0 and math.isinf(fixed.bands[0].hi)
    assert h.cz_fixed_point(4, 0.3) == -1


def test_fixed_point_radii_k1(hp):
    fixed = hp.fixed_point_radii(1)
    assert fixed.circles == ()
    assert [(b.lo, b.m) for b in fixed.bands] == [(1.0, 0)]


def test_fixed_point_radii_circles_satisfy_congruence(hp):
    for k in range(1, 25):
        fixed = hp.fixed_point_radii(k)
        assert len(fixed.circles) == max(0, math.ceil(k / 3) - 1)
        for c in fixed.circles:
            assert hp.winding_number(k, c.s) == pytest.approx(c.m, abs=1e-9)
            assert hp.profile.plateau_end < c.s < 1.0
        has_plateau = any(b.lo == 0.0 for b in fixed.bands)
        assert has_plateau == (k % 3 == 0)


def test_no_other_fixed_points_brute_force():
    # k = 1 on a 400 x 400 grid: only the origin and the complement of the support
    h = RadialHamiltonian.rotation_sector(2, 0.1)
    x = np.linspace(-1.2, 1.2, 401)
    z = x[:, None] + 1j * x[None, :]
    moved = np.abs(h.flow(1.0, z) - z)
    fixed = moved < 1e-6
    s = np.abs(z) ** 2
    assert fixed[200, 200]
    # inside the support, only points where the step has flattened out move this little
    interior = fixed & (s > 0) & (s < 1.0)
    assert np.all(s[interior] > h.profile.band_point(0.9))
    assert np.all(np.abs(h.d1(s[interior])) / math.pi < 1e-6)


@pytest.mark.parametrize("amp_rate, k", [(1.0, 3), (-1.3, 2), (0.6, 5), (1 / 3, 6)])
def test_cz_fixed_point_matches_sampled_path(amp_rate, k):
    h = RadialHamiltonian(amp_rate * math.pi * 0.8, 0.8, CutoffProfile(0.2))
    fixed = h.fixed_point_radii(k)
    radii = [0.0] + [c.s for c in fixed.circles] + [0.5 * fixed.bands[0].hi if fixed.bands[0].lo == 0 else 1.0]
    for s in radii:
        z0 = math.sqrt(s)
        path = SymplecticPath.from_function(lambda t: h.dflow_matrix(k * t, z0), 128 * k)
        assert h.cz_fixed_point(k, z0) == cz_index(path), s


def test_cz_rejects_non_fixed(hp):
    with pytest.raises(ValueError):
        hp.cz_fixed_point(1, math.sqrt(hp.profile.band_point(0.5)))


def test_origin_index(hp):
    for k in range(1, 13):
        assert hp.cz_fixed_point(k, 0.0) == 2 * math.ceil(k / 3) - 1


def test_mean_index_formula(hp):
    s = hp.profile.band_point(0.3)
    assert hp.mean_cz_fixed_point(math.sqrt(s)) == pytest.approx(-2 / 3 * float(hp.profile.d1(s)))


@settings(max_examples=200)
@given(st.floats(1e-12, 1 - 1e-12))
def test_inverse_smooth_step(p):
    x = float(inverse_smooth_step(p))
    assert 0.0 < x < 1.0
    assert float(smooth_step(x)) == pytest.approx(p, rel=1e-9, abs=1e-13)


@given(st.integers(-10**6, 10**6), st.floats(-1e-10, 1e-10))
def test_snapping(k, jitter):
    assert snap_integer(k + jitter) == k
    assert snapped_ceil(k + jitter) == k


def test_snapped_ceil_far_from_integer():
    assert snapped_ceil(2.3) == 3 and snap_integer(2.3) is None
