"""Equally spaced points of convex families anchored on the faces of a simplex."""

from facecover.bodies import (
    Ball,
    Blend,
    ConvexBody,
    EpsilonHull,
    FaceBody,
    HalfspaceSet,
    VPolytope,
    blend,
    epsilon_hull,
)
from facecover.covering import (
    FaceCoveringFamily,
    common_equispaced_point,
    covers_boundary,
    covers_simplex,
    helly_criterion,
)
from facecover.equispace import HFamily, compare, is_hfamily, solve, supinf_check
from facecover.errors import (
    BisectionStalled,
    FaceCoverError,
    HypothesisViolated,
    InvalidFamily,
    NonConvergence,
    ParseError,
    SolverError,
    ValidationError,
)
from facecover.feasibility import Status, intersect, min_max_distance
from facecover.grid import equispace_locus, grid_maximin, grid_minimax
from facecover.homotopy import epsilon_curve, find_t0
from facecover.instance import Instance, parse_instance, serialize_instance
from facecover.simplex import Face, Simplex

__version__ = "0.1.0"
