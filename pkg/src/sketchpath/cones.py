"""Cone-based spanner over a sketch.

Each corepolygon vertex shoots its admissible cones; the nearest boundary
point of the reduced domain inside a cone becomes a Steiner point joined to
the apex. Boundary arcs then chain all nodes around every corepolygon.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

import numpy as np

from .errors import NodeNotFound, PointInsideObstacle
from .geometry import DEFAULT_TOL, Point, PolygonalDomain, PolyPath, SegmentKind, Tolerance, dist
from .sketch import Sketch

__all__ = [
    "ConeFamily",
    "NodeKind",
    "EdgeKind",
    "SpannerNode",
    "SpannerEdge",
    "SpannerGraph",
    "WedgeHit",
    "admissible_cones",
    "nearest_in_wedge",
    "cone_hits",
    "build_spanner",
    "insert_query_point",
    "dijkstra",
]

TWO_PI = 2.0 * math.pi


def _ang(dx: float, dy: float) -> float:
    return math.atan2(dy, dx) % TWO_PI


@dataclass(frozen=True)
class ConeFamily:
    count: int

    @classmethod
    def for_angle(cls, cone_angle: float, minimum: int = 7) -> "ConeFamily":
        return cls(max(minimum, math.ceil(TWO_PI / cone_angle - 1e-9)))

    @property
    def angle(self) -> float:
        return TWO_PI / self.count

    @property
    def orientations(self) -> list[float]:
        """Bisector direction of each cone."""
        return [(i + 0.5) * self.angle for i in range(self.count)]

    def interval(self, i: int) -> tuple[float, float]:
        """(start angle, span) of cone i, counterclockwise."""
        return i * self.angle, self.angle

    def index_of(self, direction: float) -> int:
        return int((direction % TWO_PI) // self.angle) % self.count


class NodeKind(str, Enum):
    CORESET_VERTEX = "coreset_vertex"
    STEINER_POINT = "steiner_point"
    QUERY_POINT = "query_point"


class EdgeKind(str, Enum):
    CONE_EDGE = "cone_edge"
    BOUNDARY_ARC = "boundary_arc"
    CORRIDOR_PATH = "corridor_path"


@dataclass(frozen=True)
class SpannerNode:
    kind: NodeKind
    location: Point
    obstacle: int | None = None
    # CCW arc length along the host corepolygon boundary
    position: float | None = None


@dataclass(frozen=True)
class SpannerEdge:
    u: int
    v: int
    weight: float
    kind: EdgeKind
    # optional geometry for corridor path edges (from u to v)
    polyline: tuple[Point, ...] | None = None
    cone: int | None = None


def _overlap(s1: float, l1: float, s2: float, l2: float) -> float:
    """Measure of the overlap of two CCW angular intervals."""
    d = (s2 - s1) % TWO_PI
    total = max(0.0, min(l1, d + l2) - d)
    total += max(0.0, min(l1, d - TWO_PI + l2))
    return total


def _subtract(span: float, holes: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """[0, span] minus open intervals given in the same relative frame."""
    pieces = [(0.0, span)]
    for h0, h1 in holes:
        nxt = []
        for a, b in pieces:
            if h1 <= a or h0 >= b:
                nxt.append((a, b))
                continue
            if h0 > a:
                nxt.append((a, h0))
            if h1 < b:
                nxt.append((h1, b))
        pieces = nxt
    return [(a, b - a) for a, b in pieces if b - a > 1e-12]


def tangent_wedges(prev: Point, v: Point, nxt: Point) -> list[tuple[float, float]]:
    """The two wedges a shortest path can use when it bends around convex v."""
    a = _ang(prev[0] - v[0], prev[1] - v[1])
    b = _ang(nxt[0] - v[0], nxt[1] - v[1])
    c1 = (a, ((b + math.pi) - a) % TWO_PI)
    c2 = ((a + math.pi) % TWO_PI, (b - (a + math.pi)) % TWO_PI)
    return [c1, c2]


def interior_wedge(prev: Point, v: Point, nxt: Point) -> tuple[float, float]:
    """(start, span) of the directions pointing into a CCW polygon at v."""
    a = _ang(prev[0] - v[0], prev[1] - v[1])
    b = _ang(nxt[0] - v[0], nxt[1] - v[1])
    return b, (a - b) % TWO_PI


def admissible_cones(prev: Point | None, v: Point, nxt: Point | None, family: ConeFamily) -> list[int]:
    """Cone indices whose interior overlaps a tangent wedge at v.

    With no neighbours (a point obstacle) every cone qualifies.
    """
    if prev is None or nxt is None:
        return list(range(family.count))
    starts = np.arange(family.count) * family.angle
    span = family.angle
    hit = np.zeros(family.count, dtype=bool)
    for ws, wl in tangent_wedges(prev, v, nxt):
        d = (ws - starts) % TWO_PI
        total = np.maximum(0.0, np.minimum(span, d + wl) - d)
        total += np.maximum(0.0, np.minimum(span, d - TWO_PI + wl))
        hit |= total > 1e-12
    return np.flatnonzero(hit).tolist()


@dataclass(frozen=True)
class WedgeHit:
    distance: float
    obstacle: int
    edge: int
    t: float
    point: Point
    position: float


def nearest_in_wedge(
    apex,
    start: float,
    span: float,
    domain: PolygonalDomain,
    edge_mask: np.ndarray | None = None,
    positions: np.ndarray | None = None,
) -> WedgeHit | None:
    """Nearest point of the selected domain edges inside a convex wedge at ``apex``."""
    e = domain.edges
    owner = domain.edge_owner
    local = domain.edge_local
    if edge_mask is not None:
        e, owner, local = e[edge_mask], owner[edge_mask], local[edge_mask]
    if len(e) == 0:
        return None
    px, py = apex
    cx, cy = e[:, 0] - px, e[:, 1] - py
    ex, ey = e[:, 2] - e[:, 0], e[:, 3] - e[:, 1]
    lo = (math.cos(start), math.sin(start))
    hi = (math.cos(start + span), math.sin(start + span))
    t_lo = np.zeros(len(e))
    t_hi = np.ones(len(e))
    for ux, uy, sgn in ((lo[0], lo[1], 1.0), (hi[0], hi[1], -1.0)):
        g0 = sgn * (ux * cy - uy * cx)
        g1 = sgn * (ux * ey - uy * ex)
        scale = 1e-12 * (np.abs(cx) + np.abs(cy) + np.abs(ex) + np.abs(ey))
        with np.errstate(divide="ignore", invalid="ignore"):
            root = -g0 / g1
        flat = np.abs(g1) <= 1e-300
        t_lo = np.where(~flat & (g1 > 0), np.maximum(t_lo, root), t_lo)
        t_hi = np.where(~flat & (g1 < 0), np.minimum(t_hi, root), t_hi)
        t_hi = np.where(flat & (g0 < -scale), -1.0, t_hi)
    ok = t_lo <= t_hi
    if not ok.any():
        return None
    ee = ex * ex + ey * ey
    with np.errstate(divide="ignore", invalid="ignore"):
        tp = np.where(ee > 0, -(cx * ex + cy * ey) / ee, 0.0)
    tp = np.clip(tp, t_lo, t_hi)
    qx = cx + tp * ex
    qy = cy + tp * ey
    d = np.where(ok, np.hypot(qx, qy), np.inf)
    dmin = float(d.min())
    if not math.isfinite(dmin):
        return None
    near = np.flatnonzero(d <= dmin * (1 + 1e-12) + 1e-15)
    if positions is None:
        pos = np.array([domain.obstacles[owner[i]].cumulative[local[i]] for i in near])
        pos = pos + tp[near] * np.sqrt(ee[near])
    else:
        pos = positions[near] if edge_mask is None else positions[edge_mask][near]
        pos = pos + tp[near] * np.sqrt(ee[near])
    order = np.lexsort((pos, owner[near]))
    j = near[order[0]]
    pj = float(pos[order[0]])
    tj = float(tp[j])
    return WedgeHit(
        float(d[j]),
        int(owner[j]),
        int(local[j]),
        tj,
        Point(px + float(qx[j]), py + float(qy[j])),
        pj,
    )


@dataclass
class _Context:
    """Cached arrays for repeated wedge searches on one reduced domain."""

    domain: PolygonalDomain
    positions: np.ndarray = field(init=False)

    def __post_init__(self):
        d = self.domain
        if d.obstacles:
            self.positions = np.concatenate([o.cumulative[:-1] for o in d.obstacles])
        else:
            self.positions = np.zeros(0)


def _apex_setting(domain: PolygonalDomain, p, tol: Tolerance):
    """Edge mask and forbidden interior wedge for an apex on or off a boundary."""
    e = domain.edges
    if len(e) == 0:
        return None, None
    mask = np.ones(len(e), dtype=bool)
    ax, ay, bx, by = e[:, 0], e[:, 1], e[:, 2], e[:, 3]
    dx, dy = bx - ax, by - ay
    ll = dx * dx + dy * dy
    t = np.clip(((p[0] - ax) * dx + (p[1] - ay) * dy) / np.where(ll > 0, ll, 1.0), 0, 1)
    dd = np.hypot(ax + t * dx - p[0], ay + t * dy - p[1])
    touching = np.flatnonzero(dd <= tol.eps_abs)
    if touching.size == 0:
        return mask, None
    k = int(domain.edge_owner[touching[0]])
    poly = domain.obstacles[k]
    if poly.is_convex():
        mask &= domain.edge_owner != k
    else:
        mask[touching] = False
    # interior wedge of the host obstacle at p
    j = int(domain.edge_local[touching[0]])
    i_glob = touching[0]
    tj = t[i_glob]
    n = poly.n
    if 0 < tj < 1 and touching.size == 1:
        d_ang = _ang(dx[i_glob], dy[i_glob])
        return mask, (d_ang, math.pi)
    # at a vertex: find which vertex
    vi = (j + 1) % n if tj >= 0.5 else j
    v = poly.vertices[vi]
    return mask, interior_wedge(poly.vertices[vi - 1], v, poly.vertices[(vi + 1) % n])


def cone_hits(
    domain: PolygonalDomain,
    apex,
    cones: Iterable[int],
    family: ConeFamily,
    tol: Tolerance = DEFAULT_TOL,
    ctx: _Context | None = None,
) -> dict[int, WedgeHit]:
    """Nearest visible boundary point of ``domain`` in each requested cone."""
    mask, forbidden = _apex_setting(domain, apex, tol)
    out: dict[int, WedgeHit] = {}
    if mask is None:
        return out
    positions = ctx.positions if ctx is not None else None
    for c in cones:
        s, span = family.interval(c)
        holes = []
        if forbidden is not None:
            fs, fl = forbidden
            d = (fs - s) % TWO_PI
            holes = [(d, d + fl), (d - TWO_PI, d - TWO_PI + fl)]
        best = None
        for rs, rl in _subtract(span, holes):
            hit = nearest_in_wedge(apex, s + rs, rl, domain, mask, positions)
            if hit is None:
                continue
            if best is None or (hit.distance, hit.obstacle, hit.position) < (
                best.distance,
                best.obstacle,
                best.position,
            ):
                best = hit
        if best is not None and best.distance > tol.eps_abs:
            out[c] = best
    return out


class SpannerGraph:
    """Nodes plus cone, arc and corridor-path edges; arcs are kept implicit
    in per-obstacle rings until :meth:`edges` is requested."""

    def __init__(self, domain: PolygonalDomain, family: ConeFamily, tol: Tolerance = DEFAULT_TOL):
        self.domain = domain
        self.family = family
        self.tol = tol
        self.nodes: list[SpannerNode] = []
        self.extra_edges: list[SpannerEdge] = []
        self.rings: list[list[tuple[float, int]]] = [[] for _ in domain.obstacles]
        self._by_location: dict[tuple[int, float], int] = {}
        self._cache = None
        self.ctx = _Context(domain)

    def copy(self) -> "SpannerGraph":
        g = SpannerGraph.__new__(SpannerGraph)
        g.domain, g.family, g.tol, g.ctx = self.domain, self.family, self.tol, self.ctx
        g.nodes = list(self.nodes)
        g.extra_edges = list(self.extra_edges)
        g.rings = [list(r) for r in self.rings]
        g._by_location = dict(self._by_location)
        g._cache = None
        return g

    def __len__(self) -> int:
        return len(self.nodes)

    def _invalidate(self):
        self._cache = None

    def add_boundary_node(self, kind: NodeKind, obstacle: int, position: float) -> int:
        poly = self.domain.obstacles[obstacle]
        per = poly.perimeter
        position = position % per
        ring = self.rings[obstacle]
        # reuse a node within tolerance (including across the wrap)
        i = _bisect(ring, position)
        for j in (i - 1, i, i + 1):
            if ring:
                s, nid = ring[j % len(ring)]
                gap = abs(s - position)
                if min(gap, per - gap) <= self.tol.eps_abs:
                    return nid
        nid = len(self.nodes)
        self.nodes.append(SpannerNode(kind, poly.point_at(position), obstacle, position))
        ring.insert(i, (position, nid))
        self._invalidate()
        return nid

    def add_free_node(self, p) -> int:
        nid = len(self.nodes)
        self.nodes.append(SpannerNode(NodeKind.QUERY_POINT, Point(*p)))
        self._invalidate()
        return nid

    def add_edge(self, u: int, v: int, weight: float, kind: EdgeKind, polyline=None, cone=None):
        if u == v:
            return
        self.extra_edges.append(SpannerEdge(u, v, float(weight), kind, polyline, cone))
        self._invalidate()

    def arc_edges(self) -> list[SpannerEdge]:
        out = []
        for k, ring in enumerate(self.rings):
            if len(ring) < 2:
                continue
            per = self.domain.obstacles[k].perimeter
            for (s0, u), (s1, v) in zip(ring, ring[1:] + ring[:1]):
                w = (s1 - s0) % per
                out.append(SpannerEdge(u, v, w, EdgeKind.BOUNDARY_ARC))
        return out

    @property
    def edges(self) -> list[SpannerEdge]:
        return self.extra_edges + self.arc_edges()

    def adjacency(self) -> list[list[tuple[int, float, int]]]:
        """Per node: (neighbour, weight, edge index into :attr:`edges`)."""
        if self._cache is None:
            edges = self.edges
            adj: list[list[tuple[int, float, int]]] = [[] for _ in self.nodes]
            for i, e in enumerate(edges):
                adj[e.u].append((e.v, e.weight, i))
                adj[e.v].append((e.u, e.weight, i))
            self._cache = (edges, adj)
        return self._cache[1]

    def edge_list(self) -> list[SpannerEdge]:
        self.adjacency()
        return self._cache[0]

    def locations(self) -> np.ndarray:
        return np.array([n.location for n in self.nodes], dtype=float).reshape(-1, 2)

    def expand(self, node_path: list[int]) -> PolyPath:
        """Geometric polyline for a node path, following the chosen edges."""
        if not node_path:
            return PolyPath(())
        edges = self.edge_list()
        adj = self.adjacency()
        wps = [self.nodes[node_path[0]].location]
        kinds = []
        for u, v in zip(node_path, node_path[1:]):
            best = min((w, i) for nb, w, i in adj[u] if nb == v)
            e = edges[best[1]]
            if e.kind is EdgeKind.CORRIDOR_PATH and e.polyline:
                line = list(e.polyline) if e.u == u else list(e.polyline)[::-1]
                for p in line[1:]:
                    wps.append(p)
                    kinds.append(SegmentKind.CORRIDOR)
                continue
            wps.append(self.nodes[v].location)
            kinds.append(SegmentKind.BOUNDARY if e.kind is EdgeKind.BOUNDARY_ARC else SegmentKind.TANGENT)
        return PolyPath(tuple(wps), tuple(kinds))


def _bisect(ring, position):
    lo, hi = 0, len(ring)
    while lo < hi:
        mid = (lo + hi) // 2
        if ring[mid][0] < position:
            lo = mid + 1
        else:
            hi = mid
    return lo


def _shoot(g: SpannerGraph, apex_id: int, apex, cones, tol):
    for c, hit in cone_hits(g.domain, apex, cones, g.family, tol, g.ctx).items():
        sid = g.add_boundary_node(NodeKind.STEINER_POINT, hit.obstacle, hit.position)
        g.add_edge(apex_id, sid, dist(apex, g.nodes[sid].location), EdgeKind.CONE_EDGE, cone=c)


def build_spanner(sketch: Sketch, family: ConeFamily | None = None, tol: Tolerance = DEFAULT_TOL) -> SpannerGraph:
    """Spanner over the corepolygons of ``sketch``."""
    if family is None:
        family = ConeFamily.for_angle(sketch.params.cone_angle)
    domain = sketch.reduced_domain
    g = SpannerGraph(domain, family, tol)
    vertex_nodes: list[list[int]] = []
    for k, poly in enumerate(domain.obstacles):
        cum = poly.cumulative
        vertex_nodes.append(
            [g.add_boundary_node(NodeKind.CORESET_VERTEX, k, cum[i]) for i in range(poly.n)]
        )
    for k, poly in enumerate(domain.obstacles):
        signs = poly.turn_signs()
        n = poly.n
        for i, v in enumerate(poly.vertices):
            if signs[i] <= 0:
                continue  # reflex vertices never carry a shortest path bend
            cones = admissible_cones(poly.vertices[i - 1], v, poly.vertices[(i + 1) % n], family)
            _shoot(g, vertex_nodes[k][i], v, cones, tol)
    for cp in getattr(sketch, "corridor_paths", []) or []:
        u = g.add_boundary_node(NodeKind.CORESET_VERTEX, cp.obstacle_a, domain.obstacles[cp.obstacle_a].arc_position(cp.polyline[0]))
        v = g.add_boundary_node(NodeKind.CORESET_VERTEX, cp.obstacle_b, domain.obstacles[cp.obstacle_b].arc_position(cp.polyline[-1]))
        g.add_edge(u, v, cp.length, EdgeKind.CORRIDOR_PATH, polyline=tuple(cp.polyline))
    return g


def insert_query_point(g: SpannerGraph, p, tol: Tolerance | None = None, *, copy: bool = True) -> tuple[SpannerGraph, int]:
    """Add ``p`` with all k cones. Returns the (new) graph and the node id."""
    tol = tol or g.tol
    p = Point(*p)
    if g.domain.obstacle_containing(p, tol) is not None:
        raise PointInsideObstacle(f"{tuple(p)} lies inside an obstacle of the sketch")
    if copy:
        g = g.copy()
    existing = _node_at(g, p, tol)
    if existing is not None:
        nid = existing
    else:
        nid = g.add_free_node(p)
    cones = range(g.family.count)
    _shoot(g, nid, p, cones, tol)
    # query points act as sites for one another
    for other, node in enumerate(g.nodes):
        if other == nid or node.kind is not NodeKind.QUERY_POINT:
            continue
        _link_points(g, nid, other, tol)
    return g, nid


def _node_at(g: SpannerGraph, p, tol) -> int | None:
    for i, node in enumerate(g.nodes):
        if dist(node.location, p) <= tol.eps_abs:
            return i
    return None


def _link_points(g: SpannerGraph, a: int, b: int, tol):
    """Join two free points when each is the nearest site in its cone."""
    from .geometry import segment_visible

    pa, pb = g.nodes[a].location, g.nodes[b].location
    d = dist(pa, pb)
    if d <= tol.eps_abs or not segment_visible((pa, pb), g.domain, tol):
        return
    for src, dst in ((pa, pb), (pb, pa)):
        c = g.family.index_of(_ang(dst[0] - src[0], dst[1] - src[1]))
        hits = cone_hits(g.domain, src, [c], g.family, tol, g.ctx)
        if c not in hits or hits[c].distance >= d - tol.eps_abs:
            g.add_edge(a, b, d, EdgeKind.CONE_EDGE, cone=c)
            return


def dijkstra(g, s: int, t: int) -> tuple[float, list[int]]:
    """Binary-heap Dijkstra over ``g.adjacency()``; unreachable gives inf."""
    adj = g.adjacency() if hasattr(g, "adjacency") else g
    nn = len(adj)
    for x in (s, t):
        if not (0 <= x < nn):
            raise NodeNotFound(x)
    if s == t:
        return 0.0, []
    distv = [math.inf] * nn
    prev = [-1] * nn
    distv[s] = 0.0
    heap = [(0.0, s)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > distv[u]:
            continue
        if u == t:
            break
        for v, w, _ in adj[u]:
            nd = d + w
            if nd < distv[v]:
                distv[v] = nd
                prev[v] = u
                heapq.heappush(heap, (nd, v))
    if not math.isfinite(distv[t]):
        return math.inf, []
    path = [t]
    while path[-1] != s:
        path.append(prev[path[-1]])
    return distv[t], path[::-1]
