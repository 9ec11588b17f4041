"""Low-systole, non-convex contact forms on S^3 from radial disk maps.

A family of area-preserving disk maps built from radial Hamiltonians is
lifted to Reeb flows on the three-sphere.  Every invariant (periods, actions,
Conley-Zehnder indices, Calabi invariant, systolic ratio, extreme mean
rotation numbers) is computed in closed form and cross-checked against
brute-force numerics.
"""

from .cutoff import CutoffProfile, smooth_step, smooth_step_derivative, smooth_step_tail
from .disk import (
    ConstructionParams,
    MapReport,
    OrbitClass,
    OrbitKind,
    action_sigma,
    calabi_phi,
    cz_class,
    enumerate_orbit_classes,
    mean_cz_class,
    select_params,
    verify_mapn,
)
from .errors import NonConvergence, ParameterSearchError, RefinementNeeded
from .oracle import (
    IntegratorConfig,
    PlanarHamiltonian,
    fd_linearization,
    integrate_flow,
    oracle_suite,
    quadrature_action,
    quadrature_calabi,
    return_time_check,
    sampled_cz,
)
from .radial import FixedBand, FixedCircle, FixedPointSet, RadialHamiltonian
from .sp2_index import (
    IndexInterval,
    SymplecticPath,
    cz_index,
    interval_index,
    maslov_of_loop,
    mean_index,
    rotation_interval,
    winding,
)
from .sphere import (
    ContactFormReport,
    ReebOrbitClass,
    TheoremReport,
    check_dynamical_convexity,
    contact_report,
    invariants_sS,
    lift_class,
    systolic_ratio,
    t_min,
    verify_theorems,
    volume,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
