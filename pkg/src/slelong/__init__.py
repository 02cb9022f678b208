"""Convex geometry and weighted L^2 finiteness of monomials for S-Lelong weights."""
from .geometry import (
    EnumerationCapError,
    GeometryError,
    LatticeGap,
    NormalFan,
    PolyhedralCone,
    Polytope,
    ProjectionError,
    is_lower_set,
    lattice_gap,
    lattice_points,
    log_weight,
    normal_fan,
    project_to_polytope,
    support_value,
)
from .cones import (
    AngularCone,
    HullRegion,
    HullVerdict,
    HypothesisError,
    Membership,
    NonPointedConeError,
    UncertifiedError,
    cone_contains,
    halfspace_cone,
    hull_membership,
    hull_polygon_2d,
    hull_region,
    is_gamma_convex,
    quarter_cone,
    theorem_cone,
    triangulate,
)
from .integrals import (
    ClosedFormNorm,
    DivergentIntegralError,
    Finiteness,
    FinitenessVerdict,
    QuadratureResult,
    WeightSpec,
    finiteness_lp,
    monomial_norm_closed_form,
    quadrature_norm,
    simplicial_exp_integral,
)
from .lp import LPError, LPInfeasible, LPResult, LPUnbounded, lp_solve
from .analysis import (
    CoefficientWindow,
    CorollaryReport,
    DecayCurve,
    DecayPreconditionError,
    Example41,
    Example41Error,
    ExponentClassification,
    TheoremReport,
    classify,
    coefficient_bound,
    decay_demo,
    example41,
    polynomial_norm,
    taylor_coefficient,
    verify_corollaries,
    verify_theorem,
)

__version__ = "0.1.0"
