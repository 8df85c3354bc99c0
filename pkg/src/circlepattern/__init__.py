"""Circle patterns on quasi-simplicial triangulations of closed surfaces.

Delta-complex triangulations with loops and multiple edges, finite
homology covers that make them simplicial, circle-pattern curvature in
Euclidean and hyperbolic backgrounds, KAT feasibility checks on the cover
and a Newton solver for prescribed curvature.
"""

__version__ = "0.1.0"

from .complex import (
    DeltaComplex,
    LinkPair,
    SimplicialReport,
    SubcomplexSummary,
    boundary_matrices,
    euler_characteristic,
    format_triangulation,
    genus,
    is_connected,
    is_simplicial,
    link_pairs,
    orientation,
    parse_complex,
    parse_triangulation,
    subcomplex_summary,
)
from .covering import (
    Covering,
    VoltageAssignment,
    derived_cover,
    homology_voltages,
    identity_cover,
    is_deck_invariant,
    pullback_edge_data,
    pullback_vertex_data,
    pushforward_average,
    unwrap,
    verify_covering,
)
from .errors import (
    CirclePatternError,
    CoverNotFoundError,
    DegenerateTriangleError,
    DisconnectedError,
    EnumerationCapError,
    InvariantError,
    NonOrientableError,
    NotSimplicialError,
    ParseError,
    VoltageError,
)
from .geometry import (
    Background,
    Degenerate,
    condition_S,
    condition_S_all,
    condition_W,
    curvature_jacobian,
    curvature_map,
    degenerate_witness,
    edge_length,
    euclidean_E,
    from_u,
    to_u,
    triangle_angles,
)
from .kat import (
    FeasibilityVerdict,
    KatConstraint,
    check_base_necessary,
    check_cover,
    constant_curvature_interval,
    curvature_limit_base,
    kat_constraint,
    kat_rhs,
)
from .solver import SolveOptions, SolveResult, flow_to_target, solve_on_cover, solve_prescribed
from . import surfaces
