"""Single-shot approximate shortest paths amid convex obstacles."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cones import ConeFamily, SpannerGraph, build_spanner, dijkstra, insert_query_point
from .errors import PointInsideObstacle, Unreachable
from .geometry import DEFAULT_TOL, Point, PolygonalDomain, PolyPath, SegmentKind, Tolerance, dist, segment_visible
from .lift import lift_path
from .sketch import EpsilonParams, Mode, Sketch, build_sketch, make_params

__all__ = ["spanner_family", "PathResult", "ConvexSolver", "approx_shortest_path_convex"]

# Measured stretch of the cone spanner grows linearly in the cone angle, so
# with sqrt(eps') cones it overshoots 1 + eps' once eps' is small.
REFINE_FACTOR = 2.0


def spanner_family(params: EpsilonParams) -> ConeFamily:
    """Cone family used by the spanner; never coarser than ``params.cone_angle``."""
    angle = params.cone_angle
    if params.mode is Mode.SINGLE_SHOT:
        angle = min(angle, REFINE_FACTOR * params.eps_prime)
    return ConeFamily.for_angle(angle, minimum=params.cone_count if angle == params.cone_angle else 7)


@dataclass
class PathResult:
    length: float
    path: PolyPath
    sketch_path: PolyPath | None
    node_path: list[int]

    @property
    def waypoints(self):
        return self.path.waypoints


class ConvexSolver:
    """Sketch and spanner built once; answers any number of s-t queries."""

    def __init__(self, domain: PolygonalDomain, eps: float, tol: Tolerance = DEFAULT_TOL, params: EpsilonParams | None = None):
        self.tol = tol
        self.params = params or make_params(eps, Mode.SINGLE_SHOT)
        self.sketch: Sketch = build_sketch(domain, self.params)
        self.domain = self.sketch.domain
        self.family = spanner_family(self.params)
        self.spanner: SpannerGraph = build_spanner(self.sketch, self.family, tol)

    def query(self, s, t) -> PathResult:
        s, t = Point(*s), Point(*t)
        for p in (s, t):
            if self.domain.obstacle_containing(p, self.tol) is not None:
                raise PointInsideObstacle(f"{tuple(p)} lies inside an obstacle")
        if s == t:
            return PathResult(0.0, PolyPath((s, t)), None, [])
        if segment_visible((s, t), self.domain, self.tol):
            line = PolyPath((s, t), (SegmentKind.TANGENT,))
            return PathResult(dist(s, t), line, line, [])
        g, si = insert_query_point(self.spanner, s, self.tol)
        g, ti = insert_query_point(g, t, self.tol, copy=False)
        d, nodes = dijkstra(g, si, ti)
        if not math.isfinite(d):
            raise Unreachable("s and t are not connected in free space")
        sk_path = g.expand(nodes)
        lifted = lift_path(sk_path, self.domain, self.sketch.reduced_domain, self.tol)
        return PathResult(lifted.length, lifted, sk_path, nodes)


def approx_shortest_path_convex(domain: PolygonalDomain, s, t, eps: float, tol: Tolerance = DEFAULT_TOL) -> PathResult:
    return ConvexSolver(domain, eps, tol).query(s, t)
