"""Static SVG figures of a construction and its lifted invariants."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .cutoff import CutoffProfile  # noqa: E402
from .disk import ConstructionParams, inside_profile, outside_profile  # noqa: E402
from .sphere import ContactFormReport  # noqa: E402

__all__ = ["emit_plots", "plot_rho_vs_eps"]

# fixed metadata keeps repeated runs byte-identical
_SVG_META = {"Date": None}


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)
    return path


def _band_axis(plateau_end: float, top: float, n: int = 2000) -> np.ndarray:
    # resolve the thin transition band as well as the plateau
    return np.unique(np.concatenate([np.linspace(0.0, top, n),
                                     np.linspace(plateau_end, top, n)]))


def plot_cutoff(params: ConstructionParams, path: Path) -> Path:
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(9, 3.6))
    for delta in sorted({0.2, 0.05, params.delta}, reverse=True):
        prof = CutoffProfile(delta)
        s = _band_axis(prof.plateau_end, 1.05)
        ax0.plot(s, prof.value(s), label=f"delta={delta:.3g}")
        ax1.plot(s, prof.d1(s), label=f"delta={delta:.3g}")
    ax0.set(xlabel="s", ylabel="chi(s)", title="cutoff profile")
    ax1.set(xlabel="s", ylabel="chi'(s)", title="cutoff slope")
    ax0.legend(fontsize=8)
    return _save(fig, path)


def plot_action_profiles(params: ConstructionParams, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 3.8))
    s = _band_axis(params.h_plus.plateau_end, 1.0)
    ax.plot(s, outside_profile(params, s)[0], label="outside twist regions (s in unit disk)")
    if params.has_twist:
        r2 = params.radius_sq
        w = _band_axis(params.h_kappa.plateau_end, r2)
        ax.plot(w / r2, inside_profile(params, w)[0], label="inside twist regions (s / R^2)")
    n = params.n
    for y in (math.pi / n, -math.pi + math.pi / n):
        ax.axhline(y, color="gray", lw=0.6, ls=":")
    ax.set(xlabel="normalized radius squared", ylabel="action", title="action along radii")
    ax.legend(fontsize=8)
    return _save(fig, path)


def plot_rotation_envelopes(params: ConstructionParams, rep: ContactFormReport, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 3.8))

    def rho(sig, mean):
        return (2.0 + np.asarray(mean) / 2.0) / (math.pi + np.asarray(sig))

    s = _band_axis(params.h_plus.plateau_end, 1.0)
    ax.plot(s, rho(*outside_profile(params, s)), label="outside envelope")
    if params.has_twist:
        r2 = params.radius_sq
        w = _band_axis(params.h_kappa.plateau_end, r2)
        ax.plot(w / r2, rho(*inside_profile(params, w)), label="inside envelope")
    ax.axhline(2 / math.pi, color="k", lw=0.8, ls="--", label="binding 2/pi")
    ax.axhline(rep.extrema.sup, color="tab:red", lw=0.8, label=f"sup: S = {rep.S:.6g}")
    ax.axhline(rep.extrema.inf, color="tab:purple", lw=0.8, label=f"inf: s = {rep.s:.6g}")
    ax.set(xlabel="normalized radius squared", ylabel="mean rotation number",
           title="mean rotation number envelopes")
    ax.legend(fontsize=8)
    return _save(fig, path)


def plot_class_scatter(rep: ContactFormReport, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 3.8))
    groups: dict[str, list] = {}
    for o in rep.orbits:
        key = "binding" if isinstance(o.source, str) else ("inside" if o.source.kind.inside else "outside")
        groups.setdefault(key, []).append((o.T, o.mu_s3))
    for key, pts in sorted(groups.items()):
        t, mu = np.array(pts).T
        ax.scatter(t, mu, s=12, label=key)
    ax.axhline(3, color="gray", lw=0.6, ls=":")
    ax.set(xlabel="period T", ylabel="index on the sphere", title="closed orbit classes")
    ax.legend(fontsize=8)
    return _save(fig, path)


def emit_plots(params: ConstructionParams, rep: ContactFormReport, out_dir: str | Path,
               stem: str = "") -> list[Path]:
    """Write the four figures and return their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pre = f"{stem}-" if stem else ""
    return [
        plot_cutoff(params, out / f"{pre}cutoff.svg"),
        plot_action_profiles(params, out / f"{pre}action_profiles.svg"),
        plot_rotation_envelopes(params, rep, out / f"{pre}rotation_envelopes.svg"),
        plot_class_scatter(rep, out / f"{pre}orbit_classes.svg"),
    ]


def plot_rho_vs_eps(rows: list[dict], path: str | Path) -> Path:
    """Systolic ratio against eps for each n of a sweep, with the lower window edge."""
    fig, ax = plt.subplots(figsize=(6, 3.8))
    by_n: dict[int, list] = {}
    for r in rows:
        if r.get("rho_sys") is not None:
            by_n.setdefault(int(r["n"]), []).append((float(r["eps"]), float(r["rho_sys"])))
    for n, pts in sorted(by_n.items()):
        e, rho = np.array(sorted(pts)).T
        line, = ax.plot(e, rho, "o-", label=f"n={n}")
        ax.plot(e, n - e, ls=":", color=line.get_color())
        ax.axhline(n, ls="--", lw=0.6, color=line.get_color())
    ax.set(xlabel="eps", ylabel="systolic ratio", xscale="log")
    ax.legend(fontsize=8)
    return _save(fig, Path(path))
