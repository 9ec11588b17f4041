"""Reeb-flow invariants of the contact form on S^3 built from a disk map.

A fixed point of ``phi^k`` with action sigma becomes a closed Reeb orbit of
period ``k (pi + sigma)`` and index ``mu + 4k``; the binding circle has
period pi and its k-th cover index ``4k - 1``.  The contact volume is
``pi^2 + Cal(phi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .disk import (
    ConstructionParams,
    MapReport,
    OrbitClass,
    calabi_phi,
    enumerate_orbit_classes,
    inside_profile,
    outside_profile,
    select_params,
    verify_mapn,
)

__all__ = [
    "ReebOrbitClass",
    "ContactFormReport",
    "TheoremReport",
    "LedgerEntry",
    "lift_class",
    "lift_binding",
    "t_min",
    "volume",
    "systolic_ratio",
    "invariants_sS",
    "check_dynamical_convexity",
    "contact_report",
    "verify_theorems",
    "reference_ledger",
    "rescaled_invariants",
]

BINDING = "binding"


@dataclass(frozen=True)
class ReebOrbitClass:
    """A closed Reeb orbit (or family of them) with its period and indices."""

    source: OrbitClass | str
    k: int
    T: float
    mu_s3: int
    rho_bar: float

    @property
    def name(self) -> str:
        if self.source == BINDING:
            return f"binding^{self.k}"
        return f"{self.source.kind.value}@k={self.k},s={self.source.s:.6g}"


def lift_class(params: ConstructionParams, cls: OrbitClass, k: int | None = None) -> ReebOrbitClass:
    """Period, index and mean rotation number of the Reeb orbit through a class."""
    k = cls.k if k is None else k
    tau = math.pi + cls.sigma
    return ReebOrbitClass(cls, k, k * tau, cls.mu + 4 * k, (2.0 + cls.mu_mean_per_k / 2.0) / tau)


def lift_binding(k: int = 1) -> ReebOrbitClass:
    return ReebOrbitClass(BINDING, k, k * math.pi, 4 * k - 1, 2.0 / math.pi)


def _classes(params, k_max):
    return {k: enumerate_orbit_classes(params, k) for k in range(1, k_max + 1)}


def _sigma_floor(params: ConstructionParams) -> float:
    # smallest action over all classes: the twist center, or 0 without a twist
    if params.has_twist:
        return float(inside_profile(params, 0.0)[0])
    return 0.0


@dataclass(frozen=True)
class MinimalPeriod:
    value: float
    orbit: ReebOrbitClass
    tail_bound: float

    @property
    def certified(self) -> bool:
        return self.tail_bound >= self.value


def t_min(params: ConstructionParams, k_max: int | None = None, classes=None) -> MinimalPeriod:
    """Shortest period of a closed Reeb orbit.

    Classes are lifted at their minimal period for ``k <= k_max``; longer
    periods are bounded below by ``(k_max + 1)(pi + min sigma)``.
    """
    k_max = 8 * params.n if k_max is None else k_max
    classes = _classes(params, k_max) if classes is None else classes
    best = lift_binding(1)
    for k, cs in classes.items():
        for c in cs:
            if c.minimal_period == k:
                lifted = lift_class(params, c)
                if lifted.T < best.T:
                    best = lifted
    tail = (k_max + 1) * (math.pi + _sigma_floor(params))
    return MinimalPeriod(best.T, best, tail)


def volume(params: ConstructionParams) -> float:
    """Contact volume ``pi^2 + Cal(phi)``."""
    return math.pi**2 + calabi_phi(params)


def systolic_ratio(params: ConstructionParams, k_max: int | None = None) -> float:
    return t_min(params, k_max).value ** 2 / volume(params)


def _rho(sigma, mean_per_k):
    return (2.0 + np.asarray(mean_per_k) / 2.0) / (math.pi + np.asarray(sigma))


@dataclass(frozen=True)
class RotationExtrema:
    """Extremes of the mean rotation number over all closed orbits."""

    inf: float
    sup: float
    inf_at: str
    sup_at: str
    truncated_inf: float
    truncated_sup: float


def _extremize(profile, lo, hi, n_points, sign):
    # sign=+1 minimizes, -1 maximizes rho along a radius profile on [lo, hi]
    s = np.linspace(lo, hi, n_points)
    rho = sign * _rho(*profile(s))
    i = int(np.argmin(rho))
    best_s, best = float(s[i]), float(rho[i])
    a, b = s[max(i - 1, 0)], s[min(i + 1, n_points - 1)]
    if b > a:
        f = lambda x: sign * float(_rho(*profile(x)))
        res = minimize_scalar(f, bounds=(a, b), method="bounded", options={"xatol": 1e-13})
        if res.fun < best:
            best_s, best = float(res.x), float(res.fun)
    return sign * best, best_s


def invariants_sS(params: ConstructionParams, k_max: int | None = None, n_points: int = 20001,
                  classes=None) -> tuple[float, float, float, RotationExtrema]:
    """``s = T_min inf rho``, ``S = T_min sup rho`` and their difference.

    Circle classes occur at a dense set of radii as k grows, so the extrema
    over all orbits are those of the continuous radius profiles (whose
    endpoints are the discrete classes) together with the binding orbit.
    The same extrema over the enumerated classes ``k <= k_max`` are
    reported as a convergence check.
    """
    k_max = 8 * params.n if k_max is None else k_max
    classes = _classes(params, k_max) if classes is None else classes
    tm = t_min(params, k_max, classes).value
    cands = [(2.0 / math.pi, "binding")]
    hp = params.h_plus
    if not hp.is_zero:
        prof = lambda s: outside_profile(params, s)
        for sign in (1, -1):
            val, at = _extremize(prof, hp.plateau_end, 1.0, n_points, sign)
            cands.append((val, f"outside profile s={at:.12g}"))
        cands.append((float(_rho(*prof(0.0))), "outside plateau"))
    else:
        cands.append((float(_rho(0.0, 0.0)), "fixed disk"))
    if params.has_twist:
        hk = params.h_kappa
        prof = lambda s: inside_profile(params, s)
        for sign in (1, -1):
            val, at = _extremize(prof, hk.plateau_end, params.radius_sq, n_points, sign)
            cands.append((val, f"inside profile s={at:.12g}"))
        cands.append((float(_rho(*prof(0.0))), "inside center"))
    # ties go to the earliest candidate, so the binding orbit names the sup
    inf_v, inf_at = min(cands, key=lambda c: c[0])
    sup_v, sup_at = max(cands, key=lambda c: c[0])
    lifted = [lift_class(params, c).rho_bar for cs in classes.values() for c in cs] + [2 / math.pi]
    ext = RotationExtrema(inf_v, sup_v, inf_at, sup_at, min(lifted), max(lifted))
    s_val, S_val = tm * inf_v, tm * sup_v
    return s_val, S_val, S_val - s_val, ext


@dataclass(frozen=True)
class ConvexityCheck:
    dynamically_convex: bool
    witness: ReebOrbitClass
    negative_index_witness: ReebOrbitClass | None
    certificate: str


def check_dynamical_convexity(params: ConstructionParams, k_max: int | None = None,
                              classes=None) -> ConvexityCheck:
    """Whether every closed Reeb orbit has index at least 3.

    Orbits with ``k <= k_max`` are checked directly.  Beyond that, outside
    classes have index at least ``4k - 1`` and inside classes at least
    ``k (4 - 2n + 2/n) + 1``; the latter slope decides the tail.
    """
    n = params.n
    k_max = 8 * n if k_max is None else k_max
    classes = _classes(params, k_max) if classes is None else classes
    lifted = [lift_binding(k) for k in range(1, k_max + 1)]
    lifted += [lift_class(params, c) for cs in classes.values() for c in cs]
    witness = min(lifted, key=lambda o: (o.mu_s3, o.k))
    negative = min((o for o in lifted if o.mu_s3 < 0), key=lambda o: (o.k, o.mu_s3), default=None)
    ok = witness.mu_s3 >= 3
    slope = 4 - 2 * n + 2 / n
    if params.has_twist:
        k_next = ((k_max // n) + 1) * n
        tail = slope * k_next + 1
        tail_ok = slope >= 0 and tail >= 3
        cert = (f"k > {k_max}: outside index >= 4k - 1 >= 3; inside index >= k({slope:.6g}) + 1, "
                f"which is {tail:.6g} at k = {k_next} and " + ("nondecreasing" if slope >= 0 else "decreasing"))
    else:
        tail_ok = True
        cert = f"k > {k_max}: every orbit has index >= 4k - 1 >= 3"
    return ConvexityCheck(ok and tail_ok, witness, negative, cert)


@dataclass
class ContactFormReport:
    t_min: float
    volume: float
    rho_sys: float
    s: float
    S: float
    Delta: float
    dynamically_convex: bool
    witness: ReebOrbitClass
    negative_index_witness: ReebOrbitClass | None
    extrema: RotationExtrema
    t_min_certified: bool
    convexity_certificate: str
    orbits: list[ReebOrbitClass] = field(default_factory=list)


def contact_report(params: ConstructionParams, k_max: int | None = None) -> ContactFormReport:
    """All sphere-level invariants of the lifted contact form."""
    k_max = 8 * params.n if k_max is None else k_max
    classes = _classes(params, k_max)
    tm = t_min(params, k_max, classes)
    vol = volume(params)
    s_val, S_val, delta_val, ext = invariants_sS(params, k_max, classes=classes)
    dc = check_dynamical_convexity(params, k_max, classes)
    orbits = [lift_binding(1)] + [lift_class(params, c) for cs in classes.values() for c in cs]
    return ContactFormReport(tm.value, vol, tm.value**2 / vol, s_val, S_val, delta_val,
                             dc.dynamically_convex, dc.witness, dc.negative_index_witness, ext,
                             tm.certified, dc.certificate, orbits)


@dataclass
class LedgerEntry:
    clause: str
    passed: bool
    margin: float
    detail: str = ""


@dataclass
class TheoremReport:
    n: int
    target_eps: float
    params: ConstructionParams
    mapn: MapReport
    contact: ContactFormReport
    ledger: list[LedgerEntry]

    @property
    def passed(self) -> bool:
        return self.mapn.passed and all(e.passed for e in self.ledger)


def _window(name, value, lo, hi, detail=""):
    margin = min(value - lo, hi - value)
    return LedgerEntry(name, margin > 0, margin, detail or f"value {value!r} in ({lo!r}, {hi!r})")


def theorem_ledger(n: int, eps: float, rep: ContactFormReport) -> list[LedgerEntry]:
    """Each quantitative clause of the two main results, with its margin."""
    pi = math.pi
    c0 = -(n - 1) ** 2 + 2
    led = [
        LedgerEntry("T_min = pi", abs(rep.t_min - pi) <= 1e-12 and rep.t_min_certified,
                    1e-12 - abs(rep.t_min - pi), f"T_min = {rep.t_min!r}"),
        _window("n - eps < rho_sys < n", rep.rho_sys, n - eps, n),
        LedgerEntry("S = 2 (attained)", abs(rep.S - 2.0) <= 1e-10, 1e-10 - abs(rep.S - 2.0),
                    f"S = {rep.S!r} at {rep.extrema.sup_at}"),
        _window("-(n-1)^2 + 2 < s < -(n-1)^2 + 2 + eps", rep.s, c0, c0 + eps),
        _window("(n-1)^2 - eps < Delta < (n-1)^2", rep.Delta, (n - 1) ** 2 - eps, (n - 1) ** 2),
    ]
    if n == 2:
        w = rep.witness
        led.append(LedgerEntry("dynamically convex (min index 3)",
                               rep.dynamically_convex and w.mu_s3 == 3, float(w.mu_s3 - 3),
                               f"minimum index {w.mu_s3} at {w.name}; {rep.convexity_certificate}"))
    else:
        w = rep.negative_index_witness
        led.append(LedgerEntry("orbit with negative index exists", w is not None,
                               float(-w.mu_s3) if w else -math.inf,
                               f"index {w.mu_s3} at {w.name}" if w else "none found"))
    return led


def reference_ledger(rep: ContactFormReport, k_max: int) -> list[LedgerEntry]:
    """Exact values for the round sphere (the identity disk map)."""
    pi = math.pi

    def exact(name, value, target):
        err = abs(value - target)
        return LedgerEntry(name, err == 0.0, 0.0 - err, f"{value!r} vs {target!r}")

    covers = [lift_binding(k) for k in range(1, k_max + 1)]
    bad = [o for o in covers if o.mu_s3 != 4 * o.k - 1 or o.mu_s3 < 3]
    return [
        exact("T_min = pi", rep.t_min, pi),
        exact("volume = pi^2", rep.volume, pi**2),
        exact("rho_sys = 1", rep.rho_sys, 1.0),
        exact("s = 2", rep.s, 2.0),
        exact("S = 2", rep.S, 2.0),
        exact("Delta = 0", rep.Delta, 0.0),
        LedgerEntry("binding covers have index 4k - 1 >= 3", not bad and rep.dynamically_convex,
                    float(min(o.mu_s3 for o in covers) - 3),
                    f"k = 1..{k_max}; " + (f"first mismatch {bad[0].name}" if bad else "all match")),
    ]


def verify_theorems(n: int, eps: float, k_max: int | None = None, max_halvings: int = 12) -> TheoremReport:
    """Build the construction for (n, eps) and check every theorem clause.

    The construction parameter is tuned for a smaller ``eps' = eps 2^-i``:
    i increases until the sphere-level windows for the target eps hold.

    If no ``eps'`` works the report of the last attempt is returned with its
    failing clauses.

    Raises
    ------
    ParameterSearchError
        If the parameter search itself fails.
    """
    if n < 2 or not eps > 0:
        raise ValueError("need n >= 2 and eps > 0")
    last = None
    for i in range(max_halvings + 1):
        eps_c = eps * 2.0**-i
        params = select_params(n, eps_c, k_max=k_max)
        rep = contact_report(params, k_max)
        ledger = theorem_ledger(n, eps, rep)
        last = (params, rep, ledger)
        if all(e.passed for e in ledger):
            break
    params, rep, ledger = last
    mapn = verify_mapn(params, k_max)
    return TheoremReport(n, eps, params, mapn, rep, ledger)


def rescaled_invariants(rep: ContactFormReport, c: float) -> tuple[float, float, float]:
    """``(rho_sys, s, S)`` after scaling the contact form by c > 0.

    Periods scale by c, volume by c^2 and mean rotation numbers by 1/c.
    """
    if not c > 0:
        raise ValueError("c must be positive")
    tm, vol = c * rep.t_min, c**2 * rep.volume
    inf_rho, sup_rho = rep.extrema.inf / c, rep.extrema.sup / c
    return tm**2 / vol, tm * inf_rho, tm * sup_rho
