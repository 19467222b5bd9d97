"""Twist-operator correlators and loop masses of the critical O(n) model.

The package evaluates the closed-form two- and four-point functions of
twist operators on the sphere and in the half plane, the Werner-measure
masses of single self-avoiding loops built from them, and cross-checks
the results by three independent routes: finite-difference residuals of
the null-state differential equations, exact polygon enumeration on
finite honeycomb domains, and the drift of a reflected chordal Loewner
evolution at kappa = 6.
"""

from .correlators import (
    BulkConfig,
    CrossRatioPair,
    Normalization,
    boundary_two_point,
    coeff_B,
    cross_ratio,
    four_point,
    ising_four_point,
    ope_eta2_coefficient,
    ope_inferred_central_charge,
    two_point,
    xi_blocks,
)
from .honeycomb import (
    ClassMassTable,
    HoneycombDomain,
    MarkSet,
    Polygon,
    class_masses,
    classify,
    critical_weight,
    crossing_parity,
    enumerate_polygons,
    fit_two_point_slope,
)
from .mu_mass import (
    MassValue,
    SeparationPattern,
    boundary_far_field_report,
    q_fn,
    spin2_component,
    ttilde_two_point,
    two_point_log_mass,
    w_boundary,
    w_bulk,
    w_from_correlators,
)
from .params import (
    KacWeights,
    ModelParams,
    central_charge,
    kac_weights,
    params_from_n,
    twist_dimension,
    x_general,
)
from .pde_check import (
    ResidualReport,
    StencilSpec,
    boundary_bpz_residual,
    bpz_residual,
    w_pde_residual,
    w_real_pde_residual,
    w_subtracted,
)
from .sle import (
    DriftReport,
    LoewnerChain,
    drift_estimate,
    evolve_points,
    hydrodynamic_residual,
    sample_chain,
)
from .specfun import eta_3f2, gamma, hyp2f1, lerch_phi_third

__version__ = "0.1.0"
