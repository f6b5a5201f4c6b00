"""Two-point approximate distance queries amid convex obstacles.

Preprocessing builds the sketch and its cone spanner as usual, then gives
every node a location on the real obstacle boundary and reweights each
edge by the length of a real path between those locations. Every answer is
therefore the length of some path amid the original obstacles, so the
exact distance is a lower bound. The spanner is planarized, a distance
oracle is attached, and per-orientation nearest-site search stands in for
the cone Voronoi diagrams.
"""

from __future__ import annotations

import heapq
import json
import math
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .cones import ConeFamily, EdgeKind, NodeKind, SpannerGraph, WedgeHit, _Context, build_spanner, cone_hits
from .errors import ParseError, PointInsideObstacle, StretchCertificationFailed, Unreachable
from .geometry import (
    DEFAULT_TOL,
    ConvexPolygon,
    Point,
    PolygonalDomain,
    PolyPath,
    Tolerance,
    boundary_geodesic,
    dist,
    segment_convex_intersection,
    segment_visible,
)
from .io import dump_domain, parse_domain
from .lift import lift_path
from .pipeline import spanner_family
from .predicates import orient2d_many
from .sketch import Coreset, Mode, Sketch, _hull_of_coreset, build_sketch, make_params

__all__ = [
    "PlanarSpanner",
    "planarize",
    "delaunay_edges",
    "DistanceOracle",
    "DijkstraOracle",
    "ConeVoronoiDiagram",
    "Neighbor",
    "QueryStructure",
    "QueryGraph",
    "preprocess",
    "locate_neighbors",
    "query_distance",
    "save_structure",
    "load_structure",
]

QUERY_FORMAT = "sketchpath-query"
QUERY_VERSION = 1


# --------------------------------------------------------------- planarize


@dataclass
class PlanarSpanner:
    xy: np.ndarray  # (N, 2) embedded node locations
    edges: np.ndarray  # (E, 2) node pairs of the kept edges
    weights: np.ndarray  # (E,)
    source_edges: int  # edge count before filtering
    max_stretch: float  # certified on the sample
    sample_pairs: int

    @property
    def n_nodes(self) -> int:
        return len(self.xy)

    def matrix(self):
        return _graph_matrix(self.n_nodes, self.edges[:, 0], self.edges[:, 1], self.weights)


def _graph_matrix(n, u, v, w):
    from scipy.sparse import coo_matrix

    # csgraph treats explicit zeros as missing edges
    w = np.maximum(np.asarray(w, float), 1e-300)
    return coo_matrix((np.r_[w, w], (np.r_[u, v], np.r_[v, u])), shape=(n, n)).tocsr()


def _crosses_any(a, b, K: np.ndarray) -> bool:
    """Proper crossing of segment ab with any row (x0, y0, x1, y1) of K."""
    if not len(K):
        return False
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    near = (
        (np.minimum(K[:, 0], K[:, 2]) < hi[0])
        & (np.maximum(K[:, 0], K[:, 2]) > lo[0])
        & (np.minimum(K[:, 1], K[:, 3]) < hi[1])
        & (np.maximum(K[:, 1], K[:, 3]) > lo[1])
    )
    if not near.any():
        return False
    C = K[near]
    o1 = orient2d_many(a[0], a[1], b[0], b[1], C[:, 0], C[:, 1]).astype(int)
    o2 = orient2d_many(a[0], a[1], b[0], b[1], C[:, 2], C[:, 3]).astype(int)
    o3 = orient2d_many(C[:, 0], C[:, 1], C[:, 2], C[:, 3], a[0], a[1]).astype(int)
    o4 = orient2d_many(C[:, 0], C[:, 1], C[:, 2], C[:, 3], b[0], b[1]).astype(int)
    return bool(np.any((o1 * o2 < 0) & (o3 * o4 < 0)))


def planarize_edges(
    xy: np.ndarray,
    edges: np.ndarray,
    weights: np.ndarray,
    sample: int = 100,
    seed: int = 0,
    limit: float = 2.0,
    tol: Tolerance = DEFAULT_TOL,
) -> PlanarSpanner:
    """Greedy planar filter: edges in increasing weight, each kept unless it
    properly crosses a kept one. The stretch of the result is measured on
    ``sample`` random node pairs."""
    from scipy.sparse.csgraph import dijkstra as sp_dijkstra

    xy = np.asarray(xy, float).reshape(-1, 2)
    edges = np.asarray(edges, int).reshape(-1, 2)
    weights = np.asarray(weights, float)
    best: dict[tuple[int, int], float] = {}
    for (u, v), w in zip(edges.tolist(), weights.tolist()):
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if w < best.get(key, math.inf):
            best[key] = w
    pairs = sorted(best, key=lambda k: (best[k], k))
    kept_pairs: list[tuple[int, int]] = []
    K = np.zeros((len(pairs), 4))
    nk = 0
    for u, v in pairs:
        a, b = xy[u], xy[v]
        if _crosses_any(a, b, K[:nk]):
            continue
        K[nk] = (a[0], a[1], b[0], b[1])
        nk += 1
        kept_pairs.append((u, v))
    kept = np.array(kept_pairs, int).reshape(-1, 2)
    kw = np.array([best[p] for p in kept_pairs], float)
    n = len(xy)
    stretch, count = 1.0, 0
    if n >= 2 and len(kept) < len(pairs):
        rng = np.random.default_rng(seed)
        src = rng.integers(0, n, size=sample)
        dst = rng.integers(0, n, size=sample)
        eu = np.array([p[0] for p in pairs], int)
        ev = np.array([p[1] for p in pairs], int)
        ew = np.array([best[p] for p in pairs], float)
        full = sp_dijkstra(_graph_matrix(n, eu, ev, ew), directed=False, indices=src)
        plan = sp_dijkstra(_graph_matrix(n, kept[:, 0], kept[:, 1], kw), directed=False, indices=src)
        for i, (a, b) in enumerate(zip(src, dst)):
            d0, d1 = full[i, b], plan[i, b]
            if a == b or not math.isfinite(d0) or d0 <= 0:
                continue
            count += 1
            stretch = max(stretch, d1 / d0)
    elif n >= 2:
        count = min(sample, n * (n - 1) // 2)
    if stretch > limit + tol.eps_abs:
        raise StretchCertificationFailed(stretch, limit)
    return PlanarSpanner(xy, kept, kw, len(pairs), stretch, count)


def planarize(g: SpannerGraph, weights=None, sample: int = 100, seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> PlanarSpanner:
    edges = g.edge_list()
    pairs = np.array([(e.u, e.v) for e in edges], int).reshape(-1, 2)
    w = np.array([e.weight for e in edges], float) if weights is None else np.asarray(weights, float)
    return planarize_edges(g.locations(), pairs, w, sample, seed, tol=tol)


# ------------------------------------------------------------------ oracle


class DistanceOracle(Protocol):
    def build(self, planar: PlanarSpanner) -> "DistanceOracle": ...

    def query(self, u: int, v: int) -> float: ...

    def distances(self, sources, targets) -> np.ndarray: ...


class DijkstraOracle:
    """Exact distances on the planar spanner, one Dijkstra per source."""

    def __init__(self):
        self._m = None

    def build(self, planar: PlanarSpanner) -> "DijkstraOracle":
        self._m = planar.matrix()
        return self

    def distances(self, sources, targets) -> np.ndarray:
        from scipy.sparse.csgraph import dijkstra as sp_dijkstra

        sources = list(sources)
        targets = list(targets)
        if not sources or not targets:
            return np.zeros((len(sources), len(targets)))
        d = sp_dijkstra(self._m, directed=False, indices=sources)
        return np.asarray(d).reshape(len(sources), -1)[:, targets]

    def query(self, u: int, v: int) -> float:
        return float(self.distances([u], [v])[0, 0])


# ----------------------------------------------------- cone Voronoi stand-in


@dataclass
class ConeVoronoiDiagram:
    """Nearest site point per query, for one cone orientation.

    Point location is a direct nearest-point search over the sketch edges
    clipped to the cone at the query point.
    """

    orientation: int
    family: ConeFamily
    domain: PolygonalDomain = field(repr=False)
    ctx: _Context = field(repr=False)

    def locate(self, p, tol: Tolerance = DEFAULT_TOL) -> WedgeHit | None:
        return cone_hits(self.domain, p, [self.orientation], self.family, tol, self.ctx).get(self.orientation)


# --------------------------------------------------------------- structure


@dataclass(frozen=True)
class Neighbor:
    node: int
    weight: float
    cone: int
    hit: Point  # nearest sketch point in the cone
    anchor: Point  # where the connection meets the real obstacle boundary


@dataclass
class QueryStructure:
    params: object
    sketch: Sketch
    domain: PolygonalDomain  # convex obstacles, as sketched
    planar: PlanarSpanner
    oracle: DistanceOracle
    cvds: list[ConeVoronoiDiagram]
    node_obstacle: np.ndarray
    node_position: np.ndarray
    anchors: np.ndarray  # per node, its point on the real obstacle boundary
    rings: list[tuple[np.ndarray, np.ndarray]]  # per corepolygon (positions, node ids)
    tol: Tolerance = DEFAULT_TOL

    @property
    def family(self) -> ConeFamily:
        return self.cvds[0].family if self.cvds else ConeFamily(self.params.cone_count)

    @property
    def n_nodes(self) -> int:
        return self.planar.n_nodes

    def storage(self) -> dict[str, int]:
        return {
            "nodes": self.n_nodes,
            "edges": int(len(self.planar.edges)),
            "cvds": len(self.cvds),
            "coreset": self.sketch.total_coreset_size,
        }


@dataclass
class QueryGraph:
    """Nodes 's', 't' and spanner node ids; edges s-V_s, V_s-V_t, V_t-t."""

    nodes: list
    edges: list[tuple[object, object, float]]

    def shortest(self) -> tuple[float, list]:
        adj: dict[object, list[tuple[object, float]]] = {n: [] for n in self.nodes}
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        best = {"s": 0.0}
        prev: dict[object, object] = {}
        heap = [(0.0, 0, "s")]
        tick = 1
        while heap:
            d, _, u = heapq.heappop(heap)
            if d > best.get(u, math.inf):
                continue
            if u == "t":
                break
            for v, w in adj[u]:
                nd = d + w
                if nd < best.get(v, math.inf):
                    best[v] = nd
                    prev[v] = u
                    heapq.heappush(heap, (nd, tick, v))
                    tick += 1
        if "t" not in best:
            return math.inf, []
        path = ["t"]
        while path[-1] != "s":
            path.append(prev[path[-1]])
        return best["t"], path[::-1]


def _anchor(poly: ConvexPolygon, a, q) -> Point:
    """First point of segment a->q on ``poly`` (q itself if it is only touched at q)."""
    hit = segment_convex_intersection((a, q), poly)
    return Point(*q) if hit is None else Point(*hit[0])


def _lifted_length(domain: PolygonalDomain, a, b, tol: Tolerance) -> float:
    d = dist(a, b)
    if d <= tol.eps_abs or segment_visible((a, b), domain, tol):
        return d
    return lift_path(PolyPath((Point(*a), Point(*b))), domain, None, tol, check=False).length


def delaunay_edges(g: SpannerGraph) -> list[tuple[int, int]]:
    """Constrained Delaunay edges among the spanner nodes, with the
    corepolygon boundaries (all ring nodes inserted) as constraints."""
    import shapely
    from shapely.geometry import Polygon

    red = g.domain
    xmin, ymin, xmax, ymax = red.bounding_rect
    holes, index = [], {}
    for k, ring in enumerate(g.rings):
        if len(ring) < 3:
            continue
        pts = [tuple(map(float, g.nodes[nid].location)) for _, nid in ring]
        holes.append(pts)
        index.update({p: nid for p, (_, nid) in zip(pts, ring)})
    if not holes:
        return []
    region = Polygon([(xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)], holes)
    out = set()
    for tri in shapely.constrained_delaunay_triangles(region).geoms:
        ids = [index.get(tuple(map(float, c))) for c in list(tri.exterior.coords)[:3]]
        for a, b in ((0, 1), (1, 2), (2, 0)):
            u, v = ids[a], ids[b]
            if u is not None and v is not None and u != v:
                out.add((min(u, v), max(u, v)))
    return sorted(out)


def _rings(g_rings) -> list[tuple[np.ndarray, np.ndarray]]:
    return [(np.array([s for s, _ in r], float), np.array([n for _, n in r], int)) for r in g_rings]


def preprocess(
    domain: PolygonalDomain,
    eps: float,
    tol: Tolerance = DEFAULT_TOL,
    oracle: DistanceOracle | None = None,
    sample: int = 100,
    seed: int = 0,
) -> QueryStructure:
    params = make_params(eps, Mode.TWO_POINT_QUERY)
    sketch = build_sketch(domain, params)
    P = sketch.domain
    family = spanner_family(params)
    g = build_spanner(sketch, family, tol)
    n = len(g.nodes)
    anchors = np.array([nd.location for nd in g.nodes], float).reshape(-1, 2)
    placed = [nd.kind is NodeKind.CORESET_VERTEX for nd in g.nodes]
    edges = g.edge_list()
    weights = np.zeros(len(edges))
    # anchors first: each Steiner point is placed by the cone edge that made it
    for e in edges:
        if e.kind is EdgeKind.CONE_EDGE:
            for apex, site in ((e.u, e.v), (e.v, e.u)):
                if placed[apex] and not placed[site]:
                    k = g.nodes[site].obstacle
                    anchors[site] = _anchor(P.obstacles[k], anchors[apex], g.nodes[site].location)
                    placed[site] = True
    for i, e in enumerate(edges):
        a, b = anchors[e.u], anchors[e.v]
        if e.kind is EdgeKind.BOUNDARY_ARC:
            k = g.nodes[e.u].obstacle
            weights[i] = boundary_geodesic(P.obstacles[k], Point(*a), Point(*b), tol).length
        else:
            weights[i] = _lifted_length(P, a, b, tol)
    pairs = [(e.u, e.v) for e in edges]
    extra = delaunay_edges(g)
    pairs += extra
    weights = np.concatenate([weights, [_lifted_length(P, anchors[u], anchors[v], tol) for u, v in extra]])
    planar = planarize_edges(g.locations(), np.array(pairs, int), weights, sample, seed, tol=tol)
    oracle = (oracle or DijkstraOracle()).build(planar)
    red = sketch.reduced_domain
    cvds = [ConeVoronoiDiagram(i, family, red, g.ctx) for i in range(family.count)]
    obst = np.array([-1 if nd.obstacle is None else nd.obstacle for nd in g.nodes], int)
    pos = np.array([0.0 if nd.position is None else nd.position for nd in g.nodes], float)
    assert len(obst) == n
    return QueryStructure(params, sketch, P, planar, oracle, cvds, obst, pos, anchors, _rings(g.rings), tol)


def _ring_neighbours(qs: QueryStructure, k: int, position: float) -> list[int]:
    pos, ids = qs.rings[k]
    if not len(ids):
        return []
    per = qs.sketch.reduced_domain.obstacles[k].perimeter
    i = bisect_left(pos.tolist(), position)
    after = ids[i % len(ids)]
    before = ids[(i - 1) % len(ids)]
    for j in (i % len(ids), (i - 1) % len(ids)):
        gap = abs(pos[j] - position)
        if min(gap, per - gap) <= qs.tol.eps_abs:
            return [int(ids[j])]
    return [int(before)] if before == after else [int(before), int(after)]


def locate_neighbors(qs: QueryStructure, p) -> list[Neighbor]:
    """Per cone orientation, the nearest sketch point and the spanner nodes
    on either side of it, weighted by real path lengths."""
    p = Point(*p)
    tol = qs.tol
    if qs.domain.obstacle_containing(p, tol) is not None or not qs.domain.inside_rect(p):
        raise PointInsideObstacle(f"{tuple(p)} is not in free space")
    best: dict[int, Neighbor] = {}
    for cvd in qs.cvds:
        hit = cvd.locate(p, tol)
        if hit is None:
            continue
        poly = qs.domain.obstacles[hit.obstacle]
        anchor = _anchor(poly, p, hit.point)
        base = _lifted_length(qs.domain, p, anchor, tol)
        for nid in _ring_neighbours(qs, hit.obstacle, hit.position):
            w = base + boundary_geodesic(poly, anchor, Point(*qs.anchors[nid]), tol).length
            if nid not in best or w < best[nid].weight:
                best[nid] = Neighbor(nid, w, cvd.orientation, hit.point, anchor)
    return sorted(best.values(), key=lambda nb: (nb.weight, nb.node))


def query_graph(qs: QueryStructure, s, t) -> QueryGraph:
    ns = locate_neighbors(qs, s)
    nt = locate_neighbors(qs, t)
    D = qs.oracle.distances([n.node for n in ns], [n.node for n in nt])
    nodes: list = ["s", "t"]
    # spanner ids are ints, the two query points are strings
    for n in ns + nt:
        if n.node not in nodes:
            nodes.append(n.node)
    edges: list[tuple[object, object, float]] = [("s", n.node, n.weight) for n in ns]
    for i, a in enumerate(ns):
        for j, b in enumerate(nt):
            if math.isfinite(D[i, j]):
                edges.append((a.node, b.node, float(D[i, j])))
    edges += [(n.node, "t", n.weight) for n in nt]
    return QueryGraph(nodes, edges)


def query_distance(qs: QueryStructure, s, t) -> tuple[float, list]:
    """Approximate s-t distance and the witness path through the query graph."""
    s, t = Point(*s), Point(*t)
    for p in (s, t):
        if qs.domain.obstacle_containing(p, qs.tol) is not None or not qs.domain.inside_rect(p):
            raise PointInsideObstacle(f"{tuple(p)} is not in free space")
    if s == t:
        return 0.0, ["s", "t"]
    if segment_visible((s, t), qs.domain, qs.tol):
        return dist(s, t), ["s", "t"]
    d, path = query_graph(qs, s, t).shortest()
    if not math.isfinite(d):
        raise Unreachable("no connection between s and t in the query graph")
    return d, path


# ----------------------------------------------------------- serialization


def save_structure(qs: QueryStructure) -> str:
    pl = qs.planar
    doc = {
        "format": QUERY_FORMAT,
        "version": QUERY_VERSION,
        "eps": qs.params.eps,
        "k": qs.family.count,
        "counts": {"nodes": pl.n_nodes, "edges": int(len(pl.edges)), "obstacles": len(qs.domain.obstacles)},
        "certificate": {"max_stretch": pl.max_stretch, "pairs": pl.sample_pairs, "source_edges": pl.source_edges},
        "domain": json.loads(dump_domain(qs.domain)),
        "corepolygons": [list(map(int, c.original_indices)) for c in qs.sketch.corepolygons],
        "nodes": {
            "xy": pl.xy.tolist(),
            "obstacle": qs.node_obstacle.tolist(),
            "position": qs.node_position.tolist(),
            "anchor": qs.anchors.tolist(),
        },
        "edges": {"uv": pl.edges.tolist(), "w": pl.weights.tolist()},
        "cvds": [c.orientation for c in qs.cvds],
    }
    return json.dumps(doc, separators=(",", ":")) + "\n"


def load_structure(text: str, oracle: DistanceOracle | None = None) -> QueryStructure:
    try:
        doc = json.loads(text)
        if doc.get("format") != QUERY_FORMAT:
            raise ParseError("not a query structure file")
        if doc.get("version") != QUERY_VERSION:
            raise ParseError(f"unsupported query structure version {doc.get('version')!r}")
        domain = parse_domain(json.dumps(doc["domain"])).convexified()
        params = make_params(float(doc["eps"]), Mode.TWO_POINT_QUERY)
        corepolys, coresets, mapping = [], [], {}
        for i, idx in enumerate(doc["corepolygons"]):
            obs = domain.obstacles[i]
            cp = _hull_of_coreset(obs, Coreset(i, tuple(idx)), i)
            corepolys.append(cp)
            coresets.append(Coreset(i, tuple(idx)))
            mapping.update({(i, k): v for k, v in enumerate(cp.original_indices)})
        sketch = Sketch(params, domain, corepolys, coresets, mapping)
        nodes = doc["nodes"]
        edges = np.array(doc["edges"]["uv"], int).reshape(-1, 2)
        cert = doc["certificate"]
        planar = PlanarSpanner(
            np.array(nodes["xy"], float).reshape(-1, 2),
            edges,
            np.array(doc["edges"]["w"], float),
            int(cert["source_edges"]),
            float(cert["max_stretch"]),
            int(cert["pairs"]),
        )
        obst = np.array(nodes["obstacle"], int)
        pos = np.array(nodes["position"], float)
        anchors = np.array(nodes["anchor"], float).reshape(-1, 2)
        k = int(doc["k"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed query structure: {exc}") from exc
    family = ConeFamily(k)
    red = sketch.reduced_domain
    ctx = _Context(red)
    cvds = [ConeVoronoiDiagram(int(i), family, red, ctx) for i in doc["cvds"]]
    rings = []
    for ki in range(len(domain.obstacles)):
        ids = np.flatnonzero(obst == ki)
        order = np.argsort(pos[ids], kind="stable")
        rings.append((pos[ids][order], ids[order]))
    oracle = (oracle or DijkstraOracle()).build(planar)
    return QueryStructure(params, sketch, domain, planar, oracle, cvds, obst, pos, anchors, rings)
