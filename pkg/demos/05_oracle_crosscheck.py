"""Brute-force cross-checks: integrated flows, finite-difference linearizations, quadratures, return times.

Run: python3 demos/05_oracle_crosscheck.py
"""

import math

import numpy as np

from reeblift import RadialHamiltonian, oracle_suite, return_time_check

# %% A small randomized run of the residual suite (the full run uses 100 Hamiltonians).
rep = oracle_suite(seed=1, n_cases=10)
for row in rep.rows:
    print(f"{row.check:<45} max {row.max_residual:.2e} (tolerance {row.tolerance:.0e})")
print(f"sampled vs closed-form indices: {sum(c.agree for c in rep.cz_cases)}/{len(rep.cz_cases)} agree")

# %% The first return time of the mapping-torus Reeb flow is pi plus the action.
h = RadialHamiltonian.rotation_sector(2, 0.1)
for s in np.linspace(0.0, 1.1, 6):
    r = return_time_check(h, math.sqrt(s))
    print(f"s={s:.2f}: return time {r.time:.12f}, pi + action {r.expected:.12f}")
