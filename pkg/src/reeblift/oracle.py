"""Brute-force numerical checks of the closed-form radial dynamics.

Nothing here uses the closed-form flow: trajectories come from integrating
``(x', y') = (dH/dy, -dH/dx)`` with an explicit order-8 Runge-Kutta scheme,
linearizations from finite differences of trajectories, actions and Calabi
invariants from quadrature, and indices from sampled symplectic paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .cutoff import CutoffProfile
from .errors import NonConvergence, RefinementNeeded
from .radial import RadialHamiltonian
from .sp2_index import SymplecticPath, cz_index

__all__ = [
    "IntegratorConfig",
    "PlanarHamiltonian",
    "integrate_flow",
    "fd_linearization",
    "fd_path",
    "sampled_cz",
    "quadrature_action",
    "quadrature_calabi",
    "return_time_check",
    "ReturnTime",
    "OracleReport",
    "oracle_suite",
    "random_radial",
    "DOUBLE_PRECISION_FLOOR",
]

# below this no residual check can be met reliably in double precision
DOUBLE_PRECISION_FLOOR = 1e-13


@dataclass(frozen=True)
class IntegratorConfig:
    """Settings for trajectory integration.

    Parameters
    ----------
    max_step : float
        Largest step the adaptive scheme may take.
    order : int
        Order of the explicit Runge-Kutta pair (8 selects DOP853, 5 RK45).
    rtol, atol : float
        Local error targets.
    fd_eps : float
        Central-difference step for linearizations.
    """

    max_step: float = 0.05
    order: int = 8
    rtol: float = 1e-13
    atol: float = 1e-14
    fd_eps: float = 1e-5

    def __post_init__(self):
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")
        if self.order not in (5, 8):
            raise ValueError("order must be 5 or 8")

    @property
    def method(self) -> str:
        return "DOP853" if self.order == 8 else "RK45"


@dataclass(frozen=True)
class PlanarHamiltonian:
    """An autonomous Hamiltonian on the plane given by value and gradient.

    Both callables take arrays ``x, y`` and broadcast.
    """

    value: Callable[[np.ndarray, np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]
    support_sq: float = math.inf
    breakpoints_sq: tuple[float, ...] = ()

    @classmethod
    def from_radial(cls, h: RadialHamiltonian) -> "PlanarHamiltonian":
        """Cartesian form of ``H(x, y) = h(x^2 + y^2)``."""
        def value(x, y):
            return h.value(np.asarray(x) ** 2 + np.asarray(y) ** 2)

        def gradient(x, y):
            x, y = np.asarray(x), np.asarray(y)
            g = 2.0 * h.d1(x * x + y * y)
            return g * x, g * y

        bps = () if h.is_zero else (h.plateau_end,)
        return cls(value, gradient, h.scale if not h.is_zero else 0.0, bps)

    @classmethod
    def zero(cls) -> "PlanarHamiltonian":
        return cls(lambda x, y: np.zeros_like(np.asarray(x, float)),
                   lambda x, y: (np.zeros_like(np.asarray(x, float)),) * 2, 0.0)

    def vector_field(self, x, y):
        hx, hy = self.gradient(x, y)
        return hy, -hx


def _rhs(H: PlanarHamiltonian):
    def f(t, state):
        n = state.size // 2
        x, y = state[:n], state[n:]
        vx, vy = H.vector_field(x, y)
        return np.concatenate([vx, vy])
    return f


def _solve(H, t_end, points, cfg, t_eval=None, dense=False):
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    state = np.concatenate([points.real, points.imag])
    if t_end == 0:
        return points, None
    sol = solve_ivp(_rhs(H), (0.0, t_end), state, method=cfg.method, rtol=cfg.rtol,
                    atol=cfg.atol, max_step=cfg.max_step, t_eval=t_eval, dense_output=dense)
    if sol.status != 0:
        raise NonConvergence(f"integration failed: {sol.message}")
    n = points.size
    end = sol.y[:n, -1] + 1j * sol.y[n:, -1]
    return end, sol


def integrate_flow(H: PlanarHamiltonian, t: float, z, cfg: IntegratorConfig = IntegratorConfig()):
    """Time-t image of z (complex, scalar or array) under the Hamiltonian flow."""
    end, _ = _solve(H, t, z, cfg)
    return end if np.ndim(z) else complex(end[0])


def _fd_matrix(H, t, z0, cfg, eps):
    probes = z0 + np.array([eps, -eps, 1j * eps, -1j * eps])
    end, _ = _solve(H, t, probes, cfg)
    c1 = (end[0] - end[1]) / (2 * eps)
    c2 = (end[2] - end[3]) / (2 * eps)
    return np.array([[c1.real, c2.real], [c1.imag, c2.imag]])


def fd_linearization(H: PlanarHamiltonian, t: float, z0, cfg: IntegratorConfig = IntegratorConfig()) -> np.ndarray:
    """Linearized time-t map at z0 by central differences of trajectories.

    If the determinant drifts from 1 by more than 1e-6 the step is halved and
    the two estimates are Richardson-combined.
    """
    z0 = complex(z0)
    m = _fd_matrix(H, t, z0, cfg, cfg.fd_eps)
    if abs(np.linalg.det(m) - 1.0) > 1e-6:
        half = _fd_matrix(H, t, z0, cfg, cfg.fd_eps / 2)
        m = (4.0 * half - m) / 3.0
    return m


def fd_path(H: PlanarHamiltonian, t_end: float, z0, n_samples: int,
            cfg: IntegratorConfig = IntegratorConfig()) -> SymplecticPath:
    """Sampled path ``tau -> D(flow_{tau t_end})(z0)`` for tau in [0, 1].

    All probe trajectories are integrated once with output at every sample;
    samples are rescaled to determinant one, which leaves windings unchanged.
    """
    eps = cfg.fd_eps
    z0 = complex(z0)
    probes = z0 + np.array([eps, -eps, 1j * eps, -1j * eps])
    ts = np.linspace(0.0, t_end, n_samples + 1)
    _, sol = _solve(H, t_end, probes, cfg, t_eval=ts)
    traj = sol.y[:4] + 1j * sol.y[4:]
    c1 = (traj[0] - traj[1]) / (2 * eps)
    c2 = (traj[2] - traj[3]) / (2 * eps)
    mats = np.stack([np.stack([c1.real, c2.real], -1), np.stack([c1.imag, c2.imag], -1)], -2)
    det = np.linalg.det(mats)
    if np.min(det) <= 0:
        raise NonConvergence("finite-difference linearization lost orientation")
    mats = mats / np.sqrt(det)[:, None, None]
    mats[0] = np.eye(2)
    return SymplecticPath(ts / t_end, mats, det_tol=1e-9)


def sampled_cz(H: PlanarHamiltonian, k: int, z0, cfg: IntegratorConfig = IntegratorConfig(),
               base_samples: int = 2**8, max_samples: int = 2**12) -> int:
    """Conley-Zehnder index of z0 as a fixed point of the time-k flow, from sampled paths.

    Raises
    ------
    ValueError
        If z0 is not k-periodic within 1e-7.
    RefinementNeeded
        If even ``max_samples * k`` samples are too coarse.
    """
    z0 = complex(z0)
    drift = abs(integrate_flow(H, float(k), z0, cfg) - z0)
    if drift > 1e-7:
        raise ValueError(f"z0 is not fixed by the time-{k} flow (drift {drift:.2e})")
    samples = base_samples
    while True:
        try:
            return cz_index(fd_path(H, float(k), z0, samples * k, cfg), snap=1e-6)
        except RefinementNeeded:
            if samples >= max_samples:
                raise
            samples *= 2


def quadrature_action(H: PlanarHamiltonian, z, cfg: IntegratorConfig = IntegratorConfig(),
                      panels: int = 64, order: int = 16) -> float:
    """``int lambda_0 + int_0^1 H dt`` along the time-one trajectory from z.

    With ``lambda_0 = (x dy - y dx) / 2`` the integrand is evaluated on the
    dense output of the integrator with a composite Gauss-Legendre rule.
    """
    z = complex(z)
    _, sol = _solve(H, 1.0, z, cfg, dense=True)
    if sol is None:
        return float(H.value(z.real, z.imag))
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, 1.0, panels + 1)
    t = (0.5 * (edges[1:, None] - edges[:-1, None]) * nodes + 0.5 * (edges[1:, None] + edges[:-1, None])).ravel()
    w = (0.5 * (edges[1:, None] - edges[:-1, None]) * weights).ravel()
    x, y = sol.sol(t)
    vx, vy = H.vector_field(x, y)
    integrand = 0.5 * (x * vy - y * vx) + H.value(x, y)
    return float(np.sum(w * integrand))


def quadrature_calabi(H: PlanarHamiltonian, radius: float | None = None,
                      panels: int = 200, order: int = 16, n_angles: int = 64) -> float:
    """``2 int H omega_0`` over the disk of the given radius (default: the support).

    Polar coordinates: composite Gauss-Legendre in r, split at the known
    breakpoints, and the periodic trapezoid rule in the angle.
    """
    if radius is None:
        radius = math.sqrt(H.support_sq)
    if radius == 0:
        return 0.0
    cuts = sorted({0.0, radius, *[math.sqrt(b) for b in H.breakpoints_sq if 0 < b < radius**2]})
    nodes, weights = np.polynomial.legendre.leggauss(order)
    ang = 2 * math.pi * np.arange(n_angles) / n_angles
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        edges = np.linspace(a, b, panels + 1)
        half = 0.5 * (edges[1:] - edges[:-1])
        r = (half[:, None] * nodes + 0.5 * (edges[1:] + edges[:-1])[:, None]).ravel()
        w = (half[:, None] * weights).ravel()
        vals = H.value(r[:, None] * np.cos(ang), r[:, None] * np.sin(ang))
        total += np.sum(w * r * vals.mean(axis=1)) * 2 * math.pi
    return 2.0 * total


@dataclass(frozen=True)
class ReturnTime:
    time: float
    expected: float
    residual: float
    return_point: complex
    map_residual: float

    @property
    def ok(self) -> bool:
        return self.residual < 1e-6


def return_time_check(h: RadialHamiltonian, z, cfg: IntegratorConfig = IntegratorConfig(),
                      tol: float = 1e-6) -> ReturnTime:
    """First return time of the mapping-torus Reeb flow through z.

    On ``D x [0, pi]`` take ``beta = lambda_0 + (1 + H / pi) ds``.  The field
    ``Y = X_{H/pi} + d/ds`` spans the kernel of ``d beta``, so the Reeb field
    is ``Y / beta(Y)``.  Its flow from ``(z, 0)`` is integrated in Reeb time
    until ``s = pi``; the elapsed time is compared with ``pi + sigma(z)``.

    Raises
    ------
    NonConvergence
        If the trajectory never reaches the top of the mapping torus.
    """
    H = PlanarHamiltonian.from_radial(h)
    z = complex(z)

    def reeb(t, state):
        x, y, _ = state
        gx, gy = H.gradient(x, y)
        vx, vy = gy / math.pi, -gx / math.pi
        beta_y = 0.5 * (x * vy - y * vx) + 1.0 + float(H.value(x, y)) / math.pi
        return [vx / beta_y, vy / beta_y, 1.0 / beta_y]

    top = lambda t, state: state[2] - math.pi
    top.terminal, top.direction = True, 1
    # actions are below 2 pi here, so the return happens before 4 pi
    sol = solve_ivp(reeb, (0.0, 4 * math.pi), [z.real, z.imag, 0.0], method=cfg.method,
                    rtol=cfg.rtol, atol=cfg.atol, max_step=cfg.max_step, events=top)
    if sol.status != 1 or not sol.t_events[0].size:
        raise NonConvergence("Reeb trajectory did not return to the section")
    t_ret = float(sol.t_events[0][0])
    xr, yr, _ = sol.y_events[0][0]
    expected = math.pi + float(h.action(z))
    ret = complex(xr, yr)
    return ReturnTime(t_ret, expected, abs(t_ret - expected), ret, abs(ret - complex(h.flow(1.0, z))))


def random_radial(rng: np.random.Generator) -> RadialHamiltonian:
    """A random ``a chi_delta(s / c)`` with a in [-5, 5], c in [0.3, 1], delta in [0.02, 0.3]."""
    return RadialHamiltonian(float(rng.uniform(-5, 5)), float(rng.uniform(0.3, 1.0)),
                             CutoffProfile(float(rng.uniform(0.02, 0.3))))


@dataclass
class ResidualRow:
    check: str
    cases: int
    max_residual: float
    tolerance: float
    passed: bool
    infeasible: bool = False


@dataclass
class CzCase:
    label: str
    k: int
    s: float
    closed_form: int
    sampled: int

    @property
    def agree(self) -> bool:
        return self.closed_form == self.sampled


@dataclass
class OracleReport:
    seed: int
    rows: list[ResidualRow]
    cz_cases: list[CzCase] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows) and all(c.agree for c in self.cz_cases)

    @property
    def infeasible(self) -> bool:
        return any(r.infeasible for r in self.rows)


DEFAULT_TOLERANCES = {
    "flow vs closed form (abs, t=1)": 1e-9,
    "energy drift (abs, t=1)": 1e-9,
    "linearization vs closed form (rel)": 1e-5,
    "action quadrature vs h - s h' (abs)": 1e-8,
    "Calabi: profile quadrature vs 2 int H (rel)": 1e-8,
}


def _cz_cases(rng, cfg) -> list[CzCase]:
    """Sampled-versus-closed-form index cases on both curvature branches and the origin."""
    cases = []
    specs = [(1.0, 3), (1.0, 4), (-1.3, 2), (-0.8, 3), (0.6, 5)]
    for amp_rate, k in specs:
        # amp_rate is minus h'/pi on the plateau; choose amplitude accordingly
        scale = float(rng.uniform(0.4, 1.0))
        delta = float(rng.uniform(0.1, 0.3))
        h = RadialHamiltonian(amp_rate * math.pi * scale, scale, CutoffProfile(delta))
        H = PlanarHamiltonian.from_radial(h)
        cases.append(CzCase("origin", k, 0.0, h.cz_fixed_point(k, 0.0), sampled_cz(H, k, 0.0, cfg)))
        fixed = h.fixed_point_radii(k)
        for c in fixed.circles:
            branch = "h'' < 0" if h.curvature_sign(c.s) < 0 else "h'' > 0"
            z = math.sqrt(c.s) * np.exp(2j * math.pi * rng.uniform())
            cases.append(CzCase(f"circle, {branch}", k, c.s, h.cz_fixed_point(k, z), sampled_cz(H, k, z, cfg)))
        for b in fixed.bands:
            top = b.hi if math.isfinite(b.hi) else b.lo * 1.2
            s = float(rng.uniform(b.lo, top)) if b.lo > 0 else 0.5 * b.hi
            z = math.sqrt(s) * np.exp(2j * math.pi * rng.uniform())
            cases.append(CzCase("band, h'' = 0", k, s, h.cz_fixed_point(k, z), sampled_cz(H, k, z, cfg)))
    return cases


def oracle_suite(seed: int = 0, n_cases: int = 100, tol: float | None = None,
                 cfg: IntegratorConfig = IntegratorConfig(), cz: bool = True) -> OracleReport:
    """Compare every closed form with its brute-force counterpart.

    Parameters
    ----------
    seed : int
        Seed of the random Hamiltonians and points.
    n_cases : int
        Number of random radial Hamiltonians.
    tol : float, optional
        Replace every tolerance by this value.  Values below the double
        precision floor are flagged as infeasible when they fail.
    cz : bool
        Also run the sampled index comparisons.
    """
    rng = np.random.default_rng(seed)
    worst = {name: 0.0 for name in DEFAULT_TOLERANCES}
    for _ in range(n_cases):
        h = random_radial(rng)
        H = PlanarHamiltonian.from_radial(h)
        s = float(rng.uniform(0.0, 1.2 * h.scale))
        z = math.sqrt(s) * np.exp(2j * math.pi * rng.uniform())
        end = integrate_flow(H, 1.0, z, cfg)
        worst["flow vs closed form (abs, t=1)"] = max(worst["flow vs closed form (abs, t=1)"],
                                                      abs(end - complex(h.flow(1.0, z))))
        worst["energy drift (abs, t=1)"] = max(worst["energy drift (abs, t=1)"],
                                               abs(float(h(end)) - float(h(z))))
        fd = fd_linearization(H, 1.0, z, cfg)
        exact = h.dflow_matrix(1.0, z)
        worst["linearization vs closed form (rel)"] = max(
            worst["linearization vs closed form (rel)"], np.linalg.norm(fd - exact) / np.linalg.norm(exact))
        worst["action quadrature vs h - s h' (abs)"] = max(
            worst["action quadrature vs h - s h' (abs)"], abs(quadrature_action(H, z, cfg) - float(h.action(z))))
        cal = h.calabi()
        worst["Calabi: profile quadrature vs 2 int H (rel)"] = max(
            worst["Calabi: profile quadrature vs 2 int H (rel)"], abs(cal - quadrature_calabi(H)) / abs(cal))
    rows = []
    for name, default in DEFAULT_TOLERANCES.items():
        limit = default if tol is None else tol
        ok = bool(worst[name] < limit)
        rows.append(ResidualRow(name, n_cases, float(worst[name]), limit, ok,
                                infeasible=(not ok and limit < DOUBLE_PRECISION_FLOOR)))
    cases = _cz_cases(rng, cfg) if cz else []
    return OracleReport(seed, rows, cases)
