"""The n-sector family of area-preserving disk maps and its periodic orbits.

The map is ``phi = phi_plus o phi_minus``.  ``phi_plus`` is the time-one map
of ``h_plus(s) = (pi / n) chi_delta(s)``, a rotation by ``2 pi / n`` on
``|z|^2 <= 1 - 2 delta``.  ``phi_minus`` preserves each of the n sectors and
acts on a disk-like region ``A`` of area ``eta pi`` (total over sectors) as a
conjugate of the time-one map of ``h_K(s) = pi R^2 theta chi_delta(s / R^2)``
with ``pi R^2 = eta pi / n``.  The conjugating diffeomorphism is never built:
actions, indices and periods are conjugacy invariants, so every orbit class
is described by a radius (squared) in the model disk of the relevant factor.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .errors import ParameterSearchError
from .radial import RadialHamiltonian, snapped_ceil

__all__ = [
    "ConstructionParams",
    "OrbitKind",
    "OrbitClass",
    "StatementResult",
    "MapReport",
    "select_params",
    "action_sigma",
    "calabi_phi",
    "enumerate_orbit_classes",
    "cz_class",
    "mean_cz_class",
    "verify_mapn",
    "outside_profile",
    "inside_profile",
    "NONSTRICT_TOL",
]

MODES = ("construction", "reference", "no_kappa")
# non-strict inequalities tolerate this much round-off
NONSTRICT_TOL = 1e-12


@dataclass(frozen=True)
class ConstructionParams:
    """One member of the disk-map family.

    Parameters
    ----------
    n : int
        Number of sectors, at least 2.
    eps : float
        Smallness parameter the construction is tuned for.
    theta : float
        Rotation (in turns) of the model twist near its center, in (-n, -n + 1).
    eta : float
        Fraction of the disk area occupied by the twist regions, in (0, 1).
    delta : float
        Cutoff transition half-width, in (0, 1/2).
    mode : str
        ``"construction"`` for the genuine map, ``"reference"`` for the
        identity, ``"no_kappa"`` to drop the twist (diagnostic only).
    """

    n: int
    eps: float
    theta: float
    eta: float
    delta: float
    mode: str = "construction"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not 0.0 < self.eta < 1.0:
            raise ValueError("eta must lie in (0, 1)")
        if not 0.0 < self.delta < 0.5:
            raise ValueError("delta must lie in (0, 1/2)")

    @classmethod
    def reference(cls, n: int = 2, eps: float = 1.0) -> "ConstructionParams":
        """Parameters standing for the identity map (the round sphere)."""
        return cls(n, eps, -n + 0.5, 0.5, 0.25, mode="reference")

    @property
    def nu(self) -> float:
        return self.theta + self.n

    @property
    def radius_sq(self) -> float:
        """``R^2 = eta / n``."""
        return self.eta / self.n

    @property
    def R(self) -> float:
        return math.sqrt(self.radius_sq)

    @property
    def h_plus(self) -> RadialHamiltonian:
        if self.mode == "reference":
            return RadialHamiltonian.zero()
        return RadialHamiltonian.rotation_sector(self.n, self.delta)

    @property
    def h_kappa(self) -> RadialHamiltonian:
        if self.mode != "construction":
            return RadialHamiltonian.zero()
        return RadialHamiltonian.negative_twist(self.radius_sq, self.theta, self.delta)

    @property
    def has_twist(self) -> bool:
        return self.mode == "construction"

    def invariant_margins(self) -> dict[str, float]:
        """Margins of the defining inequalities (positive means satisfied)."""
        n = self.n
        return {
            "theta > -n": self.theta + n,
            "theta < -n + 1": -n + 1 - self.theta,
            "theta < -n + eps": -n + self.eps - self.theta,
            "nu in (0, eps)": min(self.nu, self.eps - self.nu),
            # the twist regions fit inside the rotating plateau
            "eta < 1 - 2 delta": 1.0 - 2.0 * self.delta - self.eta,
        }

    def validate(self) -> None:
        """Raise ValueError naming the first violated invariant."""
        if self.mode != "construction":
            return
        for name, margin in self.invariant_margins().items():
            if not margin > 0:
                raise ValueError(f"invalid parameters: {name} fails (margin {margin:.3g})")


class OrbitKind(str, enum.Enum):
    OUTSIDE_ORIGIN = "outside_origin"
    OUTSIDE_CIRCLE = "outside_circle"
    OUTSIDE_PLATEAU = "outside_plateau"
    OUTSIDE_EXTERIOR = "outside_exterior"
    INSIDE_CENTER = "inside_center"
    INSIDE_CIRCLE = "inside_circle"
    INSIDE_PLATEAU = "inside_plateau"
    INSIDE_ANNULUS = "inside_annulus"

    @property
    def inside(self) -> bool:
        return self.value.startswith("inside")


@dataclass(frozen=True)
class OrbitClass:
    """A family of fixed points of ``phi^k`` sharing action and indices.

    Attributes
    ----------
    kind : OrbitKind
    k : int
        The iterate at which the class was enumerated.
    minimal_period : int
        Smallest iterate fixing the points of the class.
    s : float
        Representative radius squared, in the model disk of ``h_plus`` for
        outside kinds and of ``h_K`` for inside kinds.
    s_range : tuple of float
        Radius-squared range covered by a band family (``(s, s)`` otherwise).
    m : int
        Winding integer ``-k h'(s) / pi`` of the relevant factor.
    sigma, mu, mu_mean_per_k : float, int, float
        Action, Conley-Zehnder index at iterate k, and mean index per iterate.
    multiplicity : str
        ``"point"``, ``"circle"`` or ``"family"``.
    """

    kind: OrbitKind
    k: int
    minimal_period: int
    s: float
    s_range: tuple[float, float]
    m: int
    multiplicity: str
    sigma: float = math.nan
    mu: int = 0
    mu_mean_per_k: float = math.nan

    @property
    def is_fixed_by_map(self) -> bool:
        return self.minimal_period == 1


# closed-form action and index rules --------------------------------------


def action_sigma(params: ConstructionParams, cls: OrbitClass) -> float:
    """Action of the composite map on the class.

    Outside A only ``phi_plus`` contributes.  Inside A the contribution of
    ``phi_plus`` is its plateau value and ``phi_minus`` contributes the model
    twist action at the conjugated radius.
    """
    if not cls.kind.inside:
        return float(params.h_plus.action_at(cls.s))
    return float(params.h_plus.action_at(0.0) + params.h_kappa.action_at(cls.s))


def cz_class(params: ConstructionParams, cls: OrbitClass, k: int | None = None) -> int:
    """Conley-Zehnder index of the class at iterate k (defaults to ``cls.k``)."""
    k = cls.k if k is None else k
    if not cls.kind.inside:
        return params.h_plus.cz_fixed_point(k, math.sqrt(cls.s))
    if k % params.n:
        raise ValueError("inside classes are only periodic at multiples of n")
    return 2 * k // params.n + params.h_kappa.cz_fixed_point(k, math.sqrt(cls.s))


def mean_cz_class(params: ConstructionParams, cls: OrbitClass) -> float:
    """Mean index per iterate."""
    if not cls.kind.inside:
        return params.h_plus.mean_cz_fixed_point(math.sqrt(cls.s))
    return 2.0 / params.n + params.h_kappa.mean_cz_fixed_point(math.sqrt(cls.s))


def calabi_phi(params: ConstructionParams) -> float:
    """Calabi invariant: that of ``phi_plus`` plus n copies of the twist."""
    return params.h_plus.calabi() + params.n * params.h_kappa.calabi()


def _period_of(m: int, k: int, base: int = 1) -> int:
    # per-iterate rotation m/k turns; also must be a multiple of base
    q = Fraction(m, k).denominator
    return base * q // math.gcd(base, q)


def _filled(params, cls: OrbitClass) -> OrbitClass:
    return replace(cls, sigma=action_sigma(params, cls), mu=cz_class(params, cls),
                   mu_mean_per_k=mean_cz_class(params, cls))


def enumerate_orbit_classes(params: ConstructionParams, k: int) -> list[OrbitClass]:
    """All classes of fixed points of ``phi^k``, with action and indices filled in."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    n = params.n
    out: list[OrbitClass] = []
    hp = params.h_plus
    fixed = hp.fixed_point_radii(k)
    if hp.is_zero:
        out.append(OrbitClass(OrbitKind.OUTSIDE_EXTERIOR, k, 1, 0.0, (0.0, math.inf), 0, "family"))
        return [_filled(params, c) for c in out]
    out.append(OrbitClass(OrbitKind.OUTSIDE_ORIGIN, k, 1, 0.0, (0.0, 0.0),
                          round(hp.winding_number(k, 0.0)), "point"))
    for band in fixed.bands:
        if band.lo == 0.0:
            out.append(OrbitClass(OrbitKind.OUTSIDE_PLATEAU, k, n, 0.5 * band.hi,
                                  (band.lo, band.hi), band.m, "family"))
        else:
            out.append(OrbitClass(OrbitKind.OUTSIDE_EXTERIOR, k, 1, band.lo,
                                  (band.lo, band.hi), 0, "family"))
    for c in fixed.circles:
        out.append(OrbitClass(OrbitKind.OUTSIDE_CIRCLE, k, _period_of(c.m, k), c.s,
                              (c.s, c.s), c.m, "circle"))
    if params.has_twist and k % n == 0:
        hk = params.h_kappa
        inner = hk.fixed_point_radii(k)
        m0 = round(hk.winding_number(k, 0.0))
        center_m = snapped_ceil(k * params.theta)
        out.append(OrbitClass(OrbitKind.INSIDE_CENTER, k, n, 0.0, (0.0, 0.0), center_m, "point"))
        for band in inner.bands:
            if band.lo == 0.0:
                out.append(OrbitClass(OrbitKind.INSIDE_PLATEAU, k, _period_of(m0, k, n),
                                      0.5 * band.hi, (band.lo, band.hi), band.m, "family"))
            else:
                out.append(OrbitClass(OrbitKind.INSIDE_ANNULUS, k, n, band.lo,
                                      (band.lo, band.lo), 0, "circle"))
        for c in inner.circles:
            out.append(OrbitClass(OrbitKind.INSIDE_CIRCLE, k, _period_of(c.m, k, n), c.s,
                                  (c.s, c.s), c.m, "circle"))
    return [_filled(params, c) for c in out]


# radius profiles -----------------------------------------------------------


def outside_profile(params: ConstructionParams, s):
    """Action and mean index per iterate along ``h_plus`` radii squared ``s``."""
    hp = params.h_plus
    s = np.asarray(s, dtype=float)
    return hp.action_at(s), -2.0 * hp.d1(s) / math.pi


def inside_profile(params: ConstructionParams, s):
    """Action and mean index per iterate along twist radii squared ``s`` in ``[0, R^2]``."""
    hk = params.h_kappa
    s = np.asarray(s, dtype=float)
    sigma = params.h_plus.action_at(0.0) + hk.action_at(s)
    return sigma, 2.0 / params.n - 2.0 * hk.d1(s) / math.pi


def _band_grid(plateau_end: float, scale: float, n_points: int) -> np.ndarray:
    # dense in the transition band, plus both ends of the support
    x = np.linspace(0.0, 1.0, n_points)
    band = plateau_end + (scale - plateau_end) * x
    return np.concatenate([[0.0], band])


# statement checks ----------------------------------------------------------


@dataclass
class StatementResult:
    """Outcome of one numbered statement.

    ``margin`` is the worst slack over everything checked: strict
    inequalities need it positive, non-strict ones need it at least
    ``-NONSTRICT_TOL``.  A statement with a strict main part and a
    non-strict side condition reports the latter in ``nonstrict_margin``.
    """

    label: str
    description: str
    passed: bool
    margin: float
    strict: bool
    worst: str = ""
    certificates: list[str] = field(default_factory=list)
    nonstrict_margin: float | None = None


@dataclass
class MapReport:
    params: ConstructionParams
    k_max: int
    statements: list[StatementResult]
    classes: dict[int, list[OrbitClass]]

    @property
    def violated_invariants(self) -> list[str]:
        """Defining inequalities of the parameters that fail, in declaration order."""
        if not self.params.has_twist:
            return []
        return [name for name, m in self.params.invariant_margins().items() if not m > 0]

    @property
    def passed(self) -> bool:
        return all(st.passed for st in self.statements) and not self.violated_invariants

    def first_failure(self) -> StatementResult | None:
        return next((st for st in self.statements if not st.passed), None)

    def __getitem__(self, label: str) -> StatementResult:
        return next(st for st in self.statements if st.label == label)


class _Tracker:
    """Keeps the smallest margin seen and where it occurred."""

    def __init__(self):
        self.margin = math.inf
        self.where = ""

    def see(self, margin: float, where: str):
        if margin < self.margin:
            self.margin, self.where = float(margin), where


def _label(c: OrbitClass) -> str:
    return f"{c.kind.value}@k={c.k},s={c.s:.6g}"


def verify_mapn(params: ConstructionParams, k_max: int | None = None,
                envelope_points: int = 20001, sandbox_points: int = 1000,
                seed: int = 0) -> MapReport:
    """Check the eight structural statements of the construction.

    Every class of every iterate ``k <= k_max`` is checked directly.  The
    bounds of statements (i), (vi) and (vii) depend on a class only through
    its radius, so they are also checked on the full radius profiles, which
    covers every iterate at once.  The index bound (iii) and the period bound
    (v) are extended to all k through closed forms recorded as certificates.

    Parameters violating the defining inequalities are not rejected: the
    statements are evaluated anyway and their failures appear as entries.
    """
    n, eps, nu = params.n, params.eps, params.nu
    k_max = 8 * n if k_max is None else k_max
    pi = math.pi
    classes = {k: enumerate_orbit_classes(params, k) for k in range(1, k_max + 1)}
    every = [c for cs in classes.values() for c in cs]
    hp, hk = params.h_plus, params.h_kappa
    s_out = _band_grid(hp.plateau_end, 1.0, envelope_points)
    sig_out, mean_out = outside_profile(params, s_out)
    if params.has_twist:
        s_in = _band_grid(hk.plateau_end, params.radius_sq, envelope_points)
        sig_in, mean_in = inside_profile(params, s_in)
    else:
        s_in = sig_in = mean_in = np.empty(0)
    results = []

    # (i) action bounds, and sigma >= 0 at fixed points
    lo_b, hi_b = -pi + pi / n, pi / n
    t = _Tracker()
    fixed_t = _Tracker()
    for c in every:
        t.see(min(c.sigma - lo_b, hi_b - c.sigma), _label(c))
        if c.is_fixed_by_map:
            fixed_t.see(c.sigma, _label(c))
    all_sig = np.concatenate([sig_out, sig_in])
    env = min(float(np.min(all_sig)) - lo_b, hi_b - float(np.max(all_sig)))
    t.see(env, "radius profiles")
    certs = [f"radius-profile action range [{np.min(all_sig):.12g}, {np.max(all_sig):.12g}] "
             f"inside ({lo_b:.12g}, {hi_b:.12g}); the action is monotone along each profile"]
    ok = t.margin > 0 and fixed_t.margin >= -NONSTRICT_TOL
    certs.append(f"sigma >= 0 at fixed points: margin {fixed_t.margin!r} at {fixed_t.where}")
    results.append(StatementResult(
        "i", "-pi + pi/n < sigma < pi/n, and sigma >= 0 at fixed points", ok,
        t.margin, True, t.where, certs, nonstrict_margin=fixed_t.margin))

    # (ii) Calabi window
    cal = calabi_phi(params)
    target = -pi**2 * (1 - 1 / n)
    margin = min(cal - target, target + eps - cal)
    results.append(StatementResult(
        "ii", "-pi^2(1 - 1/n) < Cal < -pi^2(1 - 1/n) + eps", margin > 0, margin, True,
        f"Cal = {cal!r}"))

    # (iii) index lower bounds
    t = _Tracker()
    for c in every:
        bound = -2 * n * c.k + Fraction(2 * c.k, n) + 1
        t.see(float(c.mu - bound), _label(c))
        if c.is_fixed_by_map:
            t.see(float(c.mu + 1), _label(c) + " (fixed point, mu >= -1)")
    certs = []
    slope_out = 2 * n - 2 / n
    certs.append(f"outside A: mu >= -1, bound slack at k = 1 is {2 * n - 2 / n - 2:.6g} "
                 f"and grows with slope {slope_out:.6g} > 0")
    if params.has_twist:
        certs.append(f"inside A: mu >= 2k/n + 2 ceil(k theta) - 1, slack = 2 ceil(k nu) - 2 >= 0 "
                     f"for all k because nu = {nu!r} > 0")
        cert_ok = nu > 0
    else:
        cert_ok = True
    results.append(StatementResult(
        "iii", "mu(z, phi^k) >= -2nk + 2k/n + 1, and mu >= -1 at fixed points",
        t.margin >= 0 and cert_ok, t.margin, False, t.where, certs))

    # (iv) invariance of the action under the map (radial sandbox)
    rng = np.random.default_rng(seed)
    dev = 0.0
    zs = np.sqrt(rng.uniform(0, 1, sandbox_points)) * np.exp(2j * pi * rng.uniform(0, 1, sandbox_points))
    dev = max(dev, float(np.max(np.abs(hp.action(hp.flow(1.0, zs)) - hp.action(zs)))))
    if params.has_twist:
        ws = zs * params.R
        dev = max(dev, float(np.max(np.abs(hk.action(hk.flow(1.0, ws)) - hk.action(ws)))))
        # the twist model commutes with the sector rotation
        rot = np.exp(2j * pi / n)
        dev = max(dev, float(np.max(np.abs(hk.flow(1.0, rot * ws) - rot * hk.flow(1.0, ws)))))
    inv_tol = 1e-10
    results.append(StatementResult(
        "iv", "sigma is invariant under the map", dev <= inv_tol, inv_tol - dev, True,
        f"max deviation {dev:.3g} over {sandbox_points} sandbox points",
        ["each class is a union of orbits on which the action is constant"]))

    # (v) non-fixed periodic points have period >= n
    t = _Tracker()
    for c in every:
        if not c.is_fixed_by_map:
            t.see(float(c.minimal_period - n + 1), _label(c))
    certs = ["outside A: per-iterate rotation is chi'/n turns with |chi'| <= 1, "
             "so a nontrivial period needs at least n iterates",
             "inside A: the sector rotation forces n | k"]
    t.margin = t.margin if math.isfinite(t.margin) else 1.0
    results.append(StatementResult(
        "v", "periodic points that are not fixed have period >= n", t.margin > 0, t.margin,
        False, t.where, certs))

    # (vi) outside A: sigma >= 0 and (2/pi) sigma <= mean <= (2/pi + eps) sigma
    t = _Tracker()

    def see_vi(sig, mean, where):
        t.see(sig, where)
        t.see(mean - 2 / pi * sig, where)
        t.see((2 / pi + eps) * sig - mean, where)

    for c in every:
        if not c.kind.inside:
            see_vi(c.sigma, c.mu_mean_per_k, _label(c))
    if sig_out.size:
        lows = np.minimum.reduce([sig_out, mean_out - 2 / pi * sig_out,
                                  (2 / pi + eps) * sig_out - mean_out])
        i = int(np.argmin(lows))
        t.see(float(lows[i]), f"outside profile at s={s_out[i]:.9g}")
    results.append(StatementResult(
        "vi", "outside A: sigma >= 0 and (2/pi) sigma <= mean <= (2/pi + eps) sigma",
        t.margin >= -NONSTRICT_TOL, t.margin, False, t.where,
        ["checked on the whole outside radius profile, which contains every outside class"]))

    # (vii) inside A: action floor and mean-index sandwich
    t = _Tracker()
    floor = -pi + pi / n * (1 + nu)

    def see_vii(sig, mean, where):
        mid = 2 / n + 2 * n / pi * sig - 2
        t.see(sig - floor, where)
        t.see(mean - (mid - nu**2), where)
        t.see(mid + nu**2 - mean, where)

    if params.has_twist:
        for c in every:
            if c.kind.inside:
                see_vii(c.sigma, c.mu_mean_per_k, _label(c))
        mid = 2 / n + 2 * n / pi * sig_in - 2
        lows = np.minimum.reduce([sig_in - floor, mean_in - (mid - nu**2), mid + nu**2 - mean_in])
        i = int(np.argmin(lows))
        t.see(float(lows[i]), f"inside profile at s={s_in[i]:.9g}")
    else:
        t.see(math.inf, "no twist")
    results.append(StatementResult(
        "vii", "inside A: sigma >= -pi + (pi/n)(1 + nu) and |mean - 2/n - (2n/pi) sigma + 2| <= nu^2",
        t.margin >= -NONSTRICT_TOL and 0 < nu < eps, t.margin, False, t.where,
        [f"nu = {nu!r} lies in (0, eps)",
         "checked on the whole inside radius profile, which contains every inside class"]))

    # (viii) the witness at the twist center
    if params.has_twist:
        center = next(c for c in classes[n] if c.kind is OrbitKind.INSIDE_CENTER)
        sig_bound = -pi + pi / n * (1 + nu) + nu
        sig_margin = sig_bound - center.sigma
        exact = Fraction(2, n) - 2 * n + 2 * Fraction(nu)
        deviation = abs(Fraction(center.mu_mean_per_k) - exact)
        # the mean index must also be the limit of the integer sequence of iterates
        seq = [(2 * j + 2 * math.ceil(j * n * params.theta - 1e-12) - 1) / (j * n) for j in (1, 10**6)]
        ok = sig_margin > 0 and float(deviation) < 1e-12 and abs(seq[-1] - float(exact)) < 1e-5
        results.append(StatementResult(
            "viii", "witness w0 in Fix(phi^n) with sigma(w0) <= -pi + (pi/n)(1 + nu) + nu "
            "and mean index 2/n - 2n + 2 nu", ok, sig_margin, False,
            f"sigma(w0) = {center.sigma!r}, mean deviation {float(deviation):.3g}",
            [f"mu(w0, phi^n) = {center.mu}", f"iterate sequence at j=1e6: {seq[-1]!r}"]))
    else:
        results.append(StatementResult("viii", "witness orbit at the twist center", False,
                                       -math.inf, False, "no twist in this mode"))
    return MapReport(params, k_max, results, classes)


# parameter selection -------------------------------------------------------


def initial_nu(n: int, eps: float) -> float:
    """Twist offset used by the search: ``min(eps, 0.05) / 2``, capped at ``n eps / (2 pi^2)``.

    The cap keeps the limiting Calabi excess ``pi^2 nu / n`` below ``eps / 2``.
    """
    return min(min(eps, 0.05) / 2, n * eps / (2 * math.pi**2))


def select_params(n: int, eps: float, max_depth: int = 40, k_max: int | None = None) -> ConstructionParams:
    """Find parameters that pass :func:`verify_mapn`.

    ``theta = -n + nu`` is fixed first; then ``eta = 1 - 2^-j`` and
    ``delta = 2^-(j+3)`` are tightened until every check passes.

    Raises
    ------
    ParameterSearchError
        After ``max_depth`` refinements, naming the first failing statement.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not eps > 0:
        raise ValueError("eps must be positive")
    nu = initial_nu(n, eps)
    theta = -n + nu
    last = None
    for j in range(1, max_depth + 1):
        params = ConstructionParams(n, eps, theta, 1.0 - 2.0**-j, 2.0 ** -(j + 3))
        try:
            params.validate()
        except ValueError as exc:
            last = ("invariants", str(exc))
            continue
        report = verify_mapn(params, k_max=k_max)
        if report.passed:
            return params
        bad = report.first_failure()
        last = (bad.label, f"statement ({bad.label}) fails with margin {bad.margin:.3g} at {bad.worst}")
    raise ParameterSearchError(
        f"no admissible parameters for n={n}, eps={eps} after {max_depth} refinements; "
        f"last failure: {last[1]}", failing=last[0])
