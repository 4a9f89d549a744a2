from .domains import Box, Domain, Intersection, Polytope, PredicateDomain, halton_points, rotate_domain
from .fd import fd_gradient, fd_hessian, fd_jacobian, fd_third, finite_difference_jet3
from .functions import (
    ConvexFunction,
    Custom,
    ExpAffine,
    Jet3,
    Quadratic,
    RotatedCompose,
    SeparableSum,
    eval_jet3,
    rotated,
    rotation2,
)
from .pieces import (
    ExpPiece,
    FlatGluedPiece,
    LogBarrierPiece,
    OneDPiece,
    PowerPiece,
    QuadraticPiece,
    flat_bump,
    piece_from_dict,
)
from .specio import domain_from_spec, domain_to_spec, function_from_spec, load_spec
