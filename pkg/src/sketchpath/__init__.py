"""Approximate Euclidean shortest paths amid polygonal obstacles."""

from .corridors import approx_shortest_path_simple
from .errors import (
    DomainError,
    GeometryError,
    InvalidEpsilon,
    NonConvexObstacle,
    OverlappingObstacles,
    ParseError,
    PointInsideObstacle,
    SelfIntersecting,
    StretchCertificationFailed,
    Unreachable,
)
from .generate import generate_instance
from .geometry import ConvexPolygon, Point, PolygonalDomain, PolyPath, SimplePolygon
from .io import dump_domain, parse_domain
from .lift import validate_path
from .oracle import exact_distance, exact_shortest_path
from .pipeline import ConvexSolver, approx_shortest_path_convex
from .query import load_structure, preprocess, query_distance, save_structure
from .sketch import Mode, build_sketch, make_params

__version__ = "0.1.0"

__all__ = [
    "ConvexPolygon",
    "ConvexSolver",
    "DomainError",
    "GeometryError",
    "InvalidEpsilon",
    "Mode",
    "NonConvexObstacle",
    "OverlappingObstacles",
    "ParseError",
    "Point",
    "PointInsideObstacle",
    "PolyPath",
    "PolygonalDomain",
    "SelfIntersecting",
    "SimplePolygon",
    "StretchCertificationFailed",
    "Unreachable",
    "approx_shortest_path",
    "approx_shortest_path_convex",
    "approx_shortest_path_simple",
    "build_sketch",
    "dump_domain",
    "exact_distance",
    "exact_shortest_path",
    "generate_instance",
    "load_structure",
    "make_params",
    "parse_domain",
    "preprocess",
    "query_distance",
    "save_structure",
    "validate_path",
]


def approx_shortest_path(domain: PolygonalDomain, s, t, eps: float):
    """Pick the convex or the simple-polygon pipeline from the obstacles."""
    if domain.all_convex():
        return approx_shortest_path_convex(domain.convexified(), s, t, eps)
    return approx_shortest_path_simple(domain, s, t, eps)
