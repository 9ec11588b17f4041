"""Conley-Zehnder and Maslov indices of sampled symplectic paths.

Run: python3 demos/01_index_machinery.py
"""

import math

import numpy as np

from reeblift import SymplecticPath, cz_index, interval_index, maslov_of_loop, mean_index, rotation_interval

# %% The interval index: singletons give 2 ceil(a) - 1, intervals around k give 2k.
for lo, hi in [(0.2, 0.4), (0.0, 0.0), (-0.1, 0.1), (1.5, 1.5)]:
    print(f"interval [{lo}, {hi}] -> index {interval_index(lo, hi)}")

# %% A shear fixes (1, 0) and turns (0, 1) clockwise, so its rotation interval sits just below 0.
shear = SymplecticPath.from_function(lambda t: np.array([[1.0, t], [0.0, 1.0]]), 256)
iv = rotation_interval(shear)
print(f"shear: rotation interval [{iv.lo:.12f}, {iv.hi:.1e}], index {cz_index(shear)}")
print(f"  closed form of the left end: {-(math.pi - 2 * math.atan(2)) / (2 * math.pi):.12f}")

# %% A full positive turn has index 1 and Maslov index 1.
turn = SymplecticPath.rotation(1.0)
print(f"full turn: index {cz_index(turn)}, Maslov {maslov_of_loop(turn)}")

# %% Mean index: rotating by 2 pi a per step averages to 2a.
est = mean_index(lambda k: SymplecticPath.rotation(0.37 * k), k_max=64)
print(f"mean index of rotation by 0.37 turns: {est.value:.12f} (error {est.error:.1e})")
