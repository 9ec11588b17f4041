"""Radial Hamiltonians: closed-form flows, actions, periodic circles and their indices.

Run: python3 demos/02_radial_flows.py
"""

import math

from reeblift import RadialHamiltonian

# %% The rotating profile: a rotation by 2 pi / n on the plateau, identity outside the unit disk.
n, delta = 3, 0.1
h = RadialHamiltonian.rotation_sector(n, delta)
print(f"h(0) = {float(h.value(0.0)):.6f}, Calabi = {h.calabi():.6f} (< pi^2/n = {math.pi**2 / n:.6f})")

# %% Fixed points of the k-th iterate: plateau when n | k, circles where k h'/pi is an integer.
for k in (1, 3, 7):
    fixed = h.fixed_point_radii(k)
    circles = ", ".join(f"s={c.s:.6f} (m={c.m})" for c in fixed.circles) or "none"
    bands = ", ".join(f"[{b.lo:.3f}, {b.hi}]" for b in fixed.bands)
    print(f"k={k}: circles {circles}; bands {bands}")

# %% Indices: the origin gives 2 ceil(k/n) - 1; circles follow the curvature branch.
for k in (1, 3, 7):
    print(f"k={k}: origin index {h.cz_fixed_point(k, 0.0)}", end="")
    for c in h.fixed_point_radii(k).circles:
        print(f", circle s={c.s:.4f} index {h.cz_fixed_point(k, math.sqrt(c.s))}", end="")
    print()

# %% Action h - s h' is pi/n (1 - delta) on the plateau and decreases to 0.
for s in (0.0, 0.5, 0.85, 0.95, 1.0):
    print(f"action at s={s}: {float(h.action_at(s)):.6f}")
