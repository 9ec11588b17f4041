"""The n-sector disk map family: parameter search, orbit classes and the eight structural checks.

Run: python3 demos/03_disk_family.py
"""

from reeblift import enumerate_orbit_classes, select_params, verify_mapn

# %% Parameter search for n = 3, eps = 1/4.
params = select_params(3, 0.25)
print(f"theta={params.theta}, eta={params.eta}, delta={params.delta}, nu={params.nu:.4f}")

# %% Classes appear inside the twist regions only at multiples of n.
for k in (1, 2, 3):
    kinds = sorted({c.kind.value for c in enumerate_orbit_classes(params, k)})
    print(f"k={k}: {kinds}")

# %% Every statement with its worst slack.
report = verify_mapn(params)
for st in report.statements:
    print(f"({st.label:>4}) {'pass' if st.passed else 'FAIL'}  margin {st.margin:.3e}  {st.description}")
