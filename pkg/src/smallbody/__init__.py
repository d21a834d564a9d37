"""Small rigid body in a planar perfect fluid: exterior potential theory via
conformal maps, pressure forces, and the point-mass/vortex limit system."""
from .conformal import (
    BodyGeometry,
    ConformalMap,
    joukowski_family_map,
    laurent_coefficients,
    map_from_name,
    unit_disk_map,
)
from .contour import (
    BoundaryCurve,
    blasius_force,
    blasius_force_real,
    contour_integral,
    laurent_far_field_checks,
    random_tangent_field,
    verify_vanishing_identity,
    xi_zeta,
)
from .errors import (
    CollisionError,
    ConvergenceError,
    InsideBodyError,
    NonFiniteError,
    SingularityError,
    SmallBodyError,
    TangencyError,
)
from .finite_eps import (
    EpsParams,
    EpsState,
    ForceBreakdown,
    blob_rhs_body_frame,
    convergence_study,
    energy,
    force_terms,
    pressure_potential,
    run_coupled,
    solid_rhs,
    support_radius_monitor,
)
from .kernels import (
    VortexBlob,
    VorticityField,
    biot_savart_exterior,
    biot_savart_hydrodynamic,
    biot_savart_plane,
    green_dirichlet,
    green_hydrodynamic,
    harmonic_field,
    velocity_total,
)
from .limit_dynamics import (
    HamiltonianReport,
    LimitParams,
    LimitState,
    hamiltonian,
    limit_rhs,
    poisson_bracket_check,
    u_tilde,
)
from .potentials import AddedMass, added_mass, kirchhoff

__version__ = "0.1.0"
