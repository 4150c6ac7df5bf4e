"""Triangulations of cusped hyperbolic 3-manifolds.

Pachner moves, canonical signatures, bounded move-graph search, ideal
tetrahedron geometry, cusp cross-sections and explicit bound formulas.
"""
from .canon import Isomorphism, canonical_signature, is_isomorphic
from .pachner import (
    Move,
    MoveError,
    MoveSequence,
    SimplexCounts,
    applicable_moves,
    apply,
    cone_over_boundary,
    derived_counts,
    invert,
    star_shellable_ball,
    verify_shelling,
)
from .search import NoPathFound, SearchBudget, StateCapHit, connect, neighbors, sphere
from .triangulation import (
    GluedTriangulation,
    ParseError,
    TriangulationError,
    parse_triangulation,
    serialize,
    skeleton_counts,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "GluedTriangulation",
    "Isomorphism",
    "Move",
    "MoveError",
    "MoveSequence",
    "NoPathFound",
    "ParseError",
    "SearchBudget",
    "SimplexCounts",
    "StateCapHit",
    "TriangulationError",
    "applicable_moves",
    "apply",
    "canonical_signature",
    "cone_over_boundary",
    "connect",
    "derived_counts",
    "invert",
    "is_isomorphic",
    "neighbors",
    "parse_triangulation",
    "serialize",
    "skeleton_counts",
    "sphere",
    "star_shellable_ball",
    "validate",
    "verify_shelling",
]
