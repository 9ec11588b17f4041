"""Lifting to the three-sphere: systolic ratio, rotation extrema and convexity.

Run: python3 demos/04_sphere_invariants.py
"""

from reeblift import verify_theorems

# %% n = 2 is dynamically convex with systolic ratio close to 2;
# n = 3 and 4 push the ratio toward n and acquire orbits of negative index.
for n, eps in [(2, 0.5), (3, 0.25), (4, 0.25)]:
    rep = verify_theorems(n, eps)
    c = rep.contact
    print(f"n={n}, eps={eps}: rho_sys={c.rho_sys:.6f}, s={c.s:.6f}, S={c.S:.6f}, Delta={c.Delta:.6f}")
    print(f"  minimum index {c.witness.mu_s3} at {c.witness.name}; dynamically convex: {c.dynamically_convex}")
    print(f"  all clauses hold: {rep.passed}")
