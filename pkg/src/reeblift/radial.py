"""Autonomous radial Hamiltonians ``H(z) = h(|z|^2)`` on the plane.

Points are complex numbers.  With ``omega_0 = dx ^ dy`` and the convention
``X_H = (dH/dy, -dH/dx)`` the time-t map is the rotation
``z -> exp(-2 i h'(|z|^2) t) z``, so every quantity here is closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.special import logit

from .cutoff import CutoffProfile

__all__ = [
    "RadialHamiltonian",
    "FixedCircle",
    "FixedBand",
    "FixedPointSet",
    "inverse_smooth_step",
    "snap_integer",
    "snapped_ceil",
]

CONGRUENCE_TOL = 1e-9


def snap_integer(value: float, tol: float = CONGRUENCE_TOL) -> int | None:
    """Return the nearest integer if ``value`` lies within ``tol`` of it, else None."""
    nearest = round(value)
    return int(nearest) if abs(value - nearest) <= tol else None


def snapped_ceil(value: float, tol: float = CONGRUENCE_TOL) -> int:
    """Ceiling that treats values within ``tol`` of an integer as that integer."""
    near = snap_integer(value, tol)
    return near if near is not None else math.ceil(value)


def inverse_smooth_step(p):
    """Solve ``psi(x) = p`` for x in (0, 1), given p in (0, 1).

    With ``L = logit(p)`` the equation reduces to ``L x^2 - (L + 2) x + 1 = 0``;
    the stable root is ``2 / ((L + 2) + sqrt(L^2 + 4))`` for ``L >= 0`` and the
    mirror image ``1 - x(-L)`` otherwise.
    """
    p = np.asarray(p, dtype=float)
    lg = np.abs(logit(p))
    x_pos = 2.0 / ((lg + 2.0) + np.sqrt(lg * lg + 4.0))
    return np.where(p >= 0.5, x_pos, 1.0 - x_pos)


@dataclass(frozen=True)
class FixedCircle:
    """An isolated circle ``|z|^2 = s`` of fixed points, with winding ``m = -k h'(s) / pi``."""

    s: float
    m: int


@dataclass(frozen=True)
class FixedBand:
    """A closed band ``lo <= |z|^2 <= hi`` (hi may be inf) where h' is constant."""

    lo: float
    hi: float
    m: int

    def contains(self, s: float) -> bool:
        return self.lo <= s <= self.hi


@dataclass(frozen=True)
class FixedPointSet:
    """Fixed points of the time-k map, sorted by radius."""

    circles: tuple[FixedCircle, ...] = field(default_factory=tuple)
    bands: tuple[FixedBand, ...] = field(default_factory=tuple)

    def contains(self, s: float, tol: float = 1e-12) -> bool:
        if any(b.lo - tol <= s <= b.hi + tol for b in self.bands):
            return True
        return any(abs(c.s - s) <= tol for c in self.circles)


@dataclass(frozen=True)
class RadialHamiltonian:
    """``h(s) = amplitude * chi_delta(s / scale)``, or identically zero.

    Parameters
    ----------
    amplitude : float
        Value of the linear extension ``h(0) / (1 - delta)``.
    scale : float
        Support radius squared; ``h(s) = 0`` for ``s >= scale``.
    profile : CutoffProfile or None
        The cutoff shape.  ``None`` gives the zero Hamiltonian.
    """

    amplitude: float
    scale: float
    profile: CutoffProfile | None

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    @classmethod
    def zero(cls) -> "RadialHamiltonian":
        return cls(0.0, 1.0, None)

    @classmethod
    def rotation_sector(cls, n: int, delta: float) -> "RadialHamiltonian":
        """``h(s) = (pi / n) chi_delta(s)``: rotation by ``2 pi / n`` near the origin."""
        return cls(math.pi / n, 1.0, CutoffProfile(delta))

    @classmethod
    def negative_twist(cls, radius_sq: float, theta: float, delta: float) -> "RadialHamiltonian":
        """``h(s) = pi R^2 theta chi_delta(s / R^2)``: rotation by ``2 pi theta`` near the origin."""
        return cls(math.pi * radius_sq * theta, radius_sq, CutoffProfile(delta))

    @property
    def is_zero(self) -> bool:
        return self.profile is None or self.amplitude == 0.0

    @property
    def plateau_end(self) -> float:
        """Outer radius squared of the region where h' is constant (0 for the zero map)."""
        return 0.0 if self.profile is None else self.profile.plateau_end * self.scale

    # profile evaluation -------------------------------------------------

    def value(self, s):
        if self.profile is None:
            return np.zeros_like(np.asarray(s, dtype=float))
        return self.amplitude * self.profile.value(np.asarray(s) / self.scale)

    def d1(self, s):
        if self.profile is None:
            return np.zeros_like(np.asarray(s, dtype=float))
        return self.amplitude / self.scale * self.profile.d1(np.asarray(s) / self.scale)

    def d2(self, s):
        if self.profile is None:
            return np.zeros_like(np.asarray(s, dtype=float))
        return self.amplitude / self.scale**2 * self.profile.d2(np.asarray(s) / self.scale)

    def curvature_sign(self, s):
        """Exact sign of h'' (robust to underflow near the band edges)."""
        if self.is_zero:
            return np.zeros_like(np.asarray(s, dtype=int))
        return int(np.sign(self.amplitude)) * self.profile.curvature_sign(np.asarray(s) / self.scale)

    def __call__(self, z):
        """H(z) = h(|z|^2)."""
        return self.value(np.abs(z) ** 2)

    # dynamics -----------------------------------------------------------

    def angular_speed(self, s):
        """Rotation rate ``-2 h'(s)`` of the circle ``|z|^2 = s``."""
        return -2.0 * self.d1(s)

    def flow(self, t, z):
        """Time-t map ``exp(-2 i h'(|z|^2) t) z``."""
        z = np.asarray(z, dtype=complex)
        return np.exp(1j * self.angular_speed(np.abs(z) ** 2) * t) * z

    def dflow(self, t, z0, u):
        """Linearized flow applied to the tangent vector u at z0."""
        z0 = np.asarray(z0, dtype=complex)
        u = np.asarray(u, dtype=complex)
        s = np.abs(z0) ** 2
        rot = np.exp(1j * self.angular_speed(s) * t)
        inner = np.real(np.conj(z0) * u)
        return -4.0 * self.d2(s) * inner * 1j * t * rot * z0 + rot * u

    def dflow_matrix(self, t, z0) -> np.ndarray:
        """Real 2x2 matrix of :meth:`dflow` at z0."""
        cols = [self.dflow(t, z0, 1.0 + 0j), self.dflow(t, z0, 1j)]
        return np.array([[cols[0].real, cols[1].real], [cols[0].imag, cols[1].imag]])

    def action(self, z):
        """Action ``h(s) - s h'(s)`` of the time-one map with respect to lambda_0."""
        s = np.abs(np.asarray(z)) ** 2
        return self.action_at(s)

    def action_at(self, s):
        s = np.asarray(s, dtype=float)
        return self.value(s) - s * self.d1(s)

    def calabi(self) -> float:
        """``4 pi int_0^inf r h(r^2) dr`` by adaptive quadrature."""
        if self.is_zero:
            return 0.0
        edge = math.sqrt(self.plateau_end)
        top = math.sqrt(self.scale)
        integrand = lambda r: r * float(self.value(r * r))
        inner, _ = quad(integrand, 0.0, edge, epsabs=1e-13, epsrel=1e-13, limit=200)
        outer, _ = quad(integrand, edge, top, epsabs=1e-13, epsrel=1e-13, limit=200)
        return 4.0 * math.pi * (inner + outer)

    # periodic points ----------------------------------------------------

    def winding_rate(self) -> float:
        """``amplitude / (pi * scale)``: minus h'/pi on the plateau."""
        return 0.0 if self.is_zero else self.amplitude / (math.pi * self.scale)

    def fixed_point_radii(self, k: int, tol: float = CONGRUENCE_TOL) -> FixedPointSet:
        """All radii squared s with ``k h'(s) / pi`` an integer.

        h'/pi runs monotonically from ``-winding_rate`` on the plateau to 0
        outside the support, so the solutions are the plateau (if its value
        is an integer), the exterior band, and one circle per integer strictly
        in between, located by inverting the smooth step in closed form.
        """
        if k < 1:
            raise ValueError("k must be a positive integer")
        if self.is_zero:
            return FixedPointSet(bands=(FixedBand(0.0, math.inf, 0),))
        q = k * self.winding_rate()
        bands = []
        plateau_m = snap_integer(q, tol)
        if plateau_m is not None:
            bands.append(FixedBand(0.0, self.plateau_end, plateau_m))
        bands.append(FixedBand(self.scale, math.inf, 0))
        lo, hi = sorted((0.0, q))
        ms = [m for m in range(math.floor(lo), math.ceil(hi) + 1)
              if m != 0 and lo + tol < m < hi - tol]
        circles = []
        if ms:
            xs = inverse_smooth_step(np.array(ms, dtype=float) / q)
            for m, x in zip(ms, xs):
                circles.append(FixedCircle(float(self.scale * self.profile.band_point(x)), m))
        circles.sort(key=lambda c: c.s)
        return FixedPointSet(tuple(circles), tuple(bands))

    def winding_number(self, k: int, s: float) -> float:
        """``-k h'(s) / pi``, an integer exactly when |z|^2 = s is k-periodic."""
        return float(-k * self.d1(s) / math.pi)

    def congruence_slack(self, k: int, s: float) -> float:
        """Error in ``-k h'(s) / pi`` caused by rounding s to double precision.

        In a thin transition band h'' is large, so a radius stored to the last
        ulp can only satisfy the congruence to ``k |h''(s)| s / pi`` times a few
        machine epsilons.
        """
        return float(8 * np.finfo(float).eps * k * abs(self.d2(s)) * max(s, self.scale) / math.pi)

    def cz_fixed_point(self, k: int, z0, tol: float = CONGRUENCE_TOL) -> int:
        """Conley-Zehnder index of z0 as a fixed point of the time-k map.

        Raises
        ------
        ValueError
            If z0 is not a fixed point of the time-k map.
        """
        s = float(np.abs(z0) ** 2)
        if s == 0.0:
            return 2 * snapped_ceil(self.winding_number(k, 0.0), tol) - 1
        m = snap_integer(self.winding_number(k, s), tol + self.congruence_slack(k, s))
        if m is None:
            raise ValueError(f"|z|^2 = {s!r} is not fixed by the time-{k} map")
        return 2 * m if self.curvature_sign(s) < 0 else 2 * m - 1

    def mean_cz_fixed_point(self, z0) -> float:
        """Mean index per unit time ``-2 h'(|z0|^2) / pi``."""
        return float(-2.0 * self.d1(np.abs(z0) ** 2) / math.pi)
