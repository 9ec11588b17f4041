"""Conley-Zehnder and Maslov indices for sampled paths in Sp(2).

Everything is measured in full turns.  For a path Phi from the identity and a
direction u, the winding ``Delta(u)`` is the total change of argument of
``Phi(t) u`` divided by 2 pi; the rotation interval is the range of
``Delta`` over all u, and the index is the interval index of that range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import NonConvergence, RefinementNeeded

__all__ = [
    "SymplecticPath",
    "IndexInterval",
    "MeanIndexEstimate",
    "interval_index",
    "winding",
    "rotation_interval",
    "cz_index",
    "maslov_of_loop",
    "mean_index",
    "rotation_matrix",
]

DET_TOL = 1e-10
MAX_STEP = math.pi / 2


def rotation_matrix(angle) -> np.ndarray:
    """Counterclockwise rotation matrices, shape ``angle.shape + (2, 2)``."""
    angle = np.asarray(angle, dtype=float)
    c, s = np.cos(angle), np.sin(angle)
    return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)


@dataclass(frozen=True)
class IndexInterval:
    """Closed interval ``[lo, hi]`` measured in full turns."""

    lo: float
    hi: float

    def __post_init__(self):
        if self.hi < self.lo:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def snapped(self, tol: float) -> "IndexInterval":
        """Move endpoints within ``tol`` of an integer onto it."""
        def snap(x):
            r = round(x)
            return float(r) if abs(x - r) <= tol else x
        lo, hi = snap(self.lo), snap(self.hi)
        return IndexInterval(min(lo, hi), max(lo, hi))


class SymplecticPath:
    """A path ``t -> Phi(t)`` in Sp(2) sampled on ``0 = t_0 < ... < t_N = 1``.

    Parameters
    ----------
    ts : array_like, shape (N,)
        Strictly increasing sample times from 0 to 1.
    mats : array_like, shape (N, 2, 2)
        Samples; the first must be the identity and all have determinant 1.
    det_tol : float
        Tolerance on the determinant and on ``Phi(0) = I``.
    """

    def __init__(self, ts, mats, det_tol: float = DET_TOL):
        ts = np.asarray(ts, dtype=float)
        mats = np.asarray(mats, dtype=float)
        if ts.ndim != 1 or mats.shape != (ts.size, 2, 2) or ts.size < 2:
            raise ValueError("need matching arrays of shape (N,) and (N, 2, 2) with N >= 2")
        if ts[0] != 0.0 or ts[-1] != 1.0 or np.any(np.diff(ts) <= 0):
            raise ValueError("sample times must increase strictly from 0 to 1")
        if np.max(np.abs(mats[0] - np.eye(2))) > det_tol:
            raise ValueError("path must start at the identity")
        det = np.linalg.det(mats)
        if np.max(np.abs(det - 1.0)) > det_tol:
            raise ValueError(f"determinant deviates from 1 by {np.max(np.abs(det - 1.0)):.2e}")
        self.ts = ts
        self.mats = mats

    @classmethod
    def from_function(cls, func: Callable[[float], np.ndarray], n_samples: int, **kw) -> "SymplecticPath":
        """Sample ``func`` at ``n_samples + 1`` equispaced times."""
        ts = np.linspace(0.0, 1.0, n_samples + 1)
        return cls(ts, np.array([func(t) for t in ts]), **kw)

    @classmethod
    def rotation(cls, turns: float, n_samples: int | None = None) -> "SymplecticPath":
        """``t -> rotation by 2 pi turns t``."""
        if n_samples is None:
            n_samples = max(8, int(math.ceil(8 * abs(turns))))
        ts = np.linspace(0.0, 1.0, n_samples + 1)
        return cls(ts, rotation_matrix(2 * math.pi * turns * ts))

    def __len__(self) -> int:
        return self.ts.size

    @property
    def end(self) -> np.ndarray:
        return self.mats[-1]

    @property
    def is_degenerate(self) -> bool:
        """Whether 1 is an eigenvalue of the endpoint (diagnostic only)."""
        return abs(np.trace(self.end) - 2.0) <= 1e-8

    def conjugate(self, a: np.ndarray) -> "SymplecticPath":
        """The path ``A^{-1} Phi A``."""
        a = np.asarray(a, dtype=float)
        return SymplecticPath(self.ts, np.linalg.inv(a) @ self.mats @ a, det_tol=1e-8)

    def compose(self, other: "SymplecticPath") -> "SymplecticPath":
        """Pointwise product ``self(t) @ other(t)`` on a common time grid."""
        if not np.array_equal(self.ts, other.ts):
            raise ValueError("paths must share the sample grid")
        return SymplecticPath(self.ts, self.mats @ other.mats, det_tol=1e-8)

    def concatenate(self, other: "SymplecticPath") -> "SymplecticPath":
        """Run ``self`` on [0, 1/2] and then ``other`` (times ``self(1)``) on [1/2, 1]."""
        ts = np.concatenate([0.5 * self.ts, 0.5 + 0.5 * other.ts[1:]])
        mats = np.concatenate([self.mats, other.mats[1:] @ self.end])
        return SymplecticPath(ts, mats, det_tol=1e-8)

    def refined(self) -> "SymplecticPath":
        """Insert a midpoint between consecutive samples.

        The midpoint is the average of its neighbours rescaled to determinant
        one; used to check that windings do not depend on the grid.
        """
        mid = 0.5 * (self.mats[1:] + self.mats[:-1])
        mid = mid / np.sqrt(np.linalg.det(mid))[:, None, None]
        ts = np.empty(2 * self.ts.size - 1)
        ts[0::2], ts[1::2] = self.ts, 0.5 * (self.ts[1:] + self.ts[:-1])
        mats = np.empty((ts.size, 2, 2))
        mats[0::2], mats[1::2] = self.mats, mid
        return SymplecticPath(ts, mats, det_tol=1e-8)


def interval_index(lo: float, hi: float | None = None) -> int:
    """Interval index of ``[lo, hi]`` (a single argument means a singleton).

    The index is the limit of the index of ``[lo - d, hi - d]`` as d decreases
    to 0.  For small d that interval contains the integer k exactly when
    ``ceil(lo) <= k < hi``, so the limit is ``2 ceil(lo)`` if ``ceil(lo) < hi``
    and ``2 ceil(lo) - 1`` otherwise.  No explicit shift is applied, which
    avoids rounding when an endpoint is within a few ulps of an integer.

    Raises
    ------
    ValueError
        If the interval is empty or has length at least 1.
    """
    if isinstance(lo, IndexInterval):
        lo, hi = lo.lo, lo.hi
    if hi is None:
        hi = lo
    if hi < lo:
        raise ValueError("empty interval")
    if hi - lo >= 1.0:
        raise ValueError(f"interval length {hi - lo} is not below 1")
    first = math.ceil(lo)
    return 2 * first if first < hi else 2 * first - 1


def _windings(path: SymplecticPath, directions: np.ndarray) -> np.ndarray:
    """Windings for an array of direction angles, shape (D,)."""
    u = np.stack([np.cos(directions), np.sin(directions)])
    v = np.einsum("nij,jd->nid", path.mats, u)
    ang = np.arctan2(v[:, 1, :], v[:, 0, :])
    inc = np.diff(ang, axis=0)
    inc = (inc + math.pi) % (2 * math.pi) - math.pi
    bad = np.abs(inc) >= MAX_STEP
    if np.any(bad):
        i, _ = np.argwhere(bad)[0]
        raise RefinementNeeded(float(path.ts[i]), float(path.ts[i + 1]), float(inc[bad][0]))
    return inc.sum(axis=0) / (2 * math.pi)


def winding(path: SymplecticPath, u) -> float:
    """Total argument change of ``t -> Phi(t) u`` in full turns.

    Raises
    ------
    RefinementNeeded
        If some sample step turns u by pi/2 or more.
    """
    u = np.asarray(u, dtype=float)
    return float(_windings(path, np.array([math.atan2(u[1], u[0])]))[0])


def _refine_extremum(path, angle, spacing, sign):
    # returns the winding at the polished minimizer of sign * winding
    f = lambda a: sign * float(_windings(path, np.array([a]))[0])
    res = minimize_scalar(f, bounds=(angle - spacing, angle + spacing), method="bounded",
                          options={"xatol": 1e-12})
    return sign * min(res.fun, f(angle))


def rotation_interval(path: SymplecticPath, n_dirs: int = 64, tol: float = 1e-9,
                      max_doublings: int = 6) -> IndexInterval:
    """Range of the winding over all directions.

    Directions are sampled on the half circle (the winding is even in u),
    the extrema are polished with a bounded scalar search, and the grid is
    doubled until the bracket moves by less than ``tol``.
    """
    if n_dirs < 8:
        raise ValueError("n_dirs must be at least 8")
    prev = None
    for _ in range(max_doublings + 1):
        angles = np.arange(n_dirs) * (math.pi / n_dirs)
        w = _windings(path, angles)
        spacing = math.pi / n_dirs
        lo = min(w.min(), _refine_extremum(path, angles[np.argmin(w)], spacing, 1.0))
        hi = max(w.max(), _refine_extremum(path, angles[np.argmax(w)], spacing, -1.0))
        if prev is not None and max(abs(lo - prev[0]), abs(hi - prev[1])) < tol:
            break
        prev = (lo, hi)
        n_dirs *= 2
    return IndexInterval(lo, hi)


def cz_index(path: SymplecticPath, snap: float = 1e-9, n_dirs: int = 64) -> int:
    """Conley-Zehnder index: the interval index of the rotation interval.

    Endpoints within ``snap`` of an integer are treated as that integer, so
    degenerate endpoints are classified consistently despite sampling noise.
    """
    return interval_index(rotation_interval(path, n_dirs).snapped(snap))


def maslov_of_loop(loop: SymplecticPath, n_dirs: int = 8, tol: float = 1e-6) -> int:
    """Maslov index of a loop based at the identity.

    Raises
    ------
    ValueError
        If the path does not close up, or directions disagree.
    """
    if np.max(np.abs(loop.end - np.eye(2))) > 1e-8:
        raise ValueError("path is not a loop at the identity")
    w = _windings(loop, np.arange(n_dirs) * (math.pi / n_dirs))
    m = round(float(w[0]))
    if np.max(np.abs(w - m)) > tol:
        raise ValueError(f"windings {w} are not a common integer")
    return int(m)


@dataclass(frozen=True)
class MeanIndexEstimate:
    value: float
    error: float
    iterates: tuple[int, ...]
    indices: tuple[int, ...]


def mean_index(path_family: Callable[[int], SymplecticPath], k_max: int = 64,
               max_error: float = 0.1) -> MeanIndexEstimate:
    """Extrapolate the mean index ``lim mu(Phi_k) / k``.

    Uses iterates ``k_max/8, k_max/4, k_max/2, k_max``.  The sequence
    ``(lo_k + hi_k) / k`` of rotation-interval midpoints (times two) has the
    same limit as ``mu_k / k`` but a smoother O(1/k) error, which the
    Richardson step ``2 b_{2k} - b_k`` removes.  The reported error is the
    difference of the last two extrapolants.

    Raises
    ------
    NonConvergence
        If the error estimate exceeds ``max_error``.
    """
    if k_max < 8:
        raise ValueError("k_max must be at least 8")
    base = k_max // 8
    ks = [base, 2 * base, 4 * base, 8 * base]
    mids, indices = [], []
    for k in ks:
        interval = rotation_interval(path_family(k))
        mids.append((interval.lo + interval.hi) / k)
        indices.append(interval_index(interval.snapped(1e-9)))
    extrap = [2 * mids[j + 1] - mids[j] for j in range(3)]
    err = abs(extrap[-1] - extrap[-2])
    if err > max_error:
        raise NonConvergence(f"mean index estimate unsettled (error {err:.3g})")
    return MeanIndexEstimate(extrap[-1], err, tuple(ks), tuple(indices))
