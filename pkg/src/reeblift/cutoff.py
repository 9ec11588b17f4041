"""Smooth convex cutoff profiles chi_delta.

The profile is linear, ``chi(s) = 1 - delta - s``, on ``[0, 1 - 2 delta]`` and
bends smoothly down to zero on the transition band ``[1 - 2 delta, 1]``.  On
the band the slope is ``-psi(x)`` with ``x = (s - (1 - 2 delta)) / (2 delta)``
and ``psi`` the standard smooth step

    psi(t) = e^{-1/(1-t)} / (e^{-1/(1-t)} + e^{-1/t}),

which is decreasing, equal to 1 for ``t <= 0`` and 0 for ``t >= 1``, and
satisfies ``psi(t) + psi(1 - t) = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import expit

__all__ = ["CutoffProfile", "smooth_step", "smooth_step_derivative", "smooth_step_tail"]

_TABLE_CELLS = 2048
_GL_ORDER = 16
# beyond this |logit| the step is exactly flat in double precision
_FLAT_LOGIT = 700.0


def _logit_arg(t):
    with np.errstate(divide="ignore", invalid="ignore"):
        return 1.0 / t - 1.0 / (1.0 - t)


def _smooth_step_scalar(t: float) -> np.float64:
    # ODE right-hand sides call this once per step; skip the array machinery
    if t <= 0.0:
        return np.float64(1.0)
    if t >= 1.0:
        return np.float64(0.0)
    return np.float64(expit(1.0 / t - 1.0 / (1.0 - t)))


def smooth_step(t):
    """Evaluate psi(t); 1 for t <= 0, 0 for t >= 1."""
    if np.ndim(t) == 0:
        return _smooth_step_scalar(float(t))
    # clipping sends the argument to +-inf at the ends, where expit is exact
    tc = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return expit(_logit_arg(tc))


def smooth_step_derivative(t):
    """Evaluate psi'(t), which is <= 0 and vanishes outside (0, 1)."""
    t = np.asarray(t, dtype=float)
    inside = (t > 0.0) & (t < 1.0)
    tt = np.where(inside, t, 0.5)
    g = _logit_arg(tt)
    flat = np.abs(g) > _FLAT_LOGIT
    tt = np.where(flat, 0.5, tt)
    g = np.where(flat, 0.0, g)
    d = -expit(g) * expit(-g) * (1.0 / tt**2 + 1.0 / (1.0 - tt) ** 2)
    return np.where(inside & ~flat, d, 0.0)


@lru_cache(maxsize=1)
def _tail_table():
    nodes, weights = np.polynomial.legendre.leggauss(_GL_ORDER)
    edges = np.linspace(0.0, 1.0, _TABLE_CELLS + 1)
    a, b = edges[:-1, None], edges[1:, None]
    pts = 0.5 * (b - a) * nodes + 0.5 * (a + b)
    cell = 0.5 * (b[:, 0] - a[:, 0]) * (smooth_step(pts) @ weights)
    # tail[i] = integral of psi over [edges[i], 1]
    tail = np.concatenate([np.cumsum(cell[::-1])[::-1], [0.0]])
    return edges, tail, nodes, weights


def smooth_step_tail(x):
    """Return the tail integral ``Psi(x) = int_x^1 psi(t) dt`` for x in [0, 1].

    A cumulative table on a uniform grid is completed by a 16-point
    Gauss-Legendre rule on the partial cell, which keeps the result at
    round-off accuracy.
    """
    edges, tail, nodes, weights = _tail_table()
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    i = np.minimum((x * _TABLE_CELLS).astype(int), _TABLE_CELLS - 1)
    right = edges[i + 1]
    half = 0.5 * (right - x)
    pts = half[..., None] * nodes + (0.5 * (right + x))[..., None]
    partial = half * (smooth_step(pts) @ weights)
    return tail[i + 1] + partial


@lru_cache(maxsize=1)
def _first_moment():
    # int_0^1 t psi(t) dt, equal to int_0^1 Psi(x) dx
    _, tail, _, _ = _tail_table()
    nodes, weights = np.polynomial.legendre.leggauss(_GL_ORDER)
    edges = np.linspace(0.0, 1.0, _TABLE_CELLS + 1)
    a, b = edges[:-1, None], edges[1:, None]
    pts = 0.5 * (b - a) * nodes + 0.5 * (a + b)
    return float(np.sum(0.5 * (b[:, 0] - a[:, 0]) * ((pts * smooth_step(pts)) @ weights)))


@dataclass(frozen=True)
class CutoffProfile:
    """The convex cutoff chi_delta with its first two derivatives.

    Parameters
    ----------
    delta : float
        Half-width of the transition band, in (0, 1/2).
    """

    delta: float

    def __post_init__(self):
        if not 0.0 < self.delta < 0.5:
            raise ValueError(f"delta must lie in (0, 1/2), got {self.delta!r}")
        _tail_table()

    @property
    def plateau_end(self) -> float:
        """Right end ``1 - 2 delta`` of the linear part."""
        return 1.0 - 2.0 * self.delta

    def band_coordinate(self, s):
        """Map s to the transition coordinate x (x <= 0 on the plateau, x >= 1 outside)."""
        return (np.asarray(s, dtype=float) - self.plateau_end) / (2.0 * self.delta)

    def band_point(self, x):
        """Inverse of :meth:`band_coordinate`."""
        return self.plateau_end + 2.0 * self.delta * np.asarray(x, dtype=float)

    def value(self, s):
        s = np.asarray(s, dtype=float)
        x = self.band_coordinate(s)
        band = 2.0 * self.delta * smooth_step_tail(x)
        out = np.where(x <= 0.0, 1.0 - self.delta - s, band)
        return np.where(x >= 1.0, 0.0, out)

    def d1(self, s):
        return -smooth_step(self.band_coordinate(s))

    def d2(self, s):
        return -smooth_step_derivative(self.band_coordinate(s)) / (2.0 * self.delta)

    def curvature_sign(self, s):
        """Exact sign of chi'' (1 strictly inside the band, 0 elsewhere).

        The second derivative underflows to 0 near the band edges even though
        it is positive there, so callers that branch on its sign use this.
        """
        x = self.band_coordinate(s)
        return np.where((x > 0.0) & (x < 1.0), 1, 0)

    def integral(self) -> float:
        """``int_0^inf chi_delta(s) ds`` in closed form up to the step's first moment."""
        return 0.5 * self.plateau_end + 4.0 * self.delta**2 * _first_moment()
