"""Corridor decomposition of free space amid simple-polygon obstacles.

Free space inside the bounding rectangle is triangulated, the dual graph is
pruned to its junction triangles, and each remaining dual path becomes a
corridor. The two geodesics across a corridor form an hourglass whose sides
are the convex chains that get sketched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .cones import build_spanner, dijkstra, insert_query_point
from .errors import PointInsideObstacle, Unreachable
from .geometry import (
    DEFAULT_TOL,
    ConvexPolygon,
    Point,
    PolygonalDomain,
    SimplePolygon,
    PolyPath,
    SegmentKind,
    Tolerance,
    _crossing_parity,
    dist,
    segment_visible,
    _segments_intersect_mask,
    segments_intersect,
)
from .lift import lift_path
from .pipeline import PathResult, approx_shortest_path_convex, spanner_family
from .predicates import orient2d, orient2d_many
from .sketch import (
    Coreset,
    Corepolygon,
    EpsilonParams,
    Mode,
    Patch,
    Sketch,
    _hull_of_coreset,
    coreset_of,
    exterior_turns,
    greedy_patch_runs,
    make_params,
    partition_patches,
)

__all__ = [
    "Triangulation",
    "triangulate_free_space",
    "locate_triangle",
    "DualGraph3",
    "Corridor",
    "reduce_to_g3",
    "HourglassKind",
    "Funnel",
    "Hourglass",
    "string_pull",
    "hourglass_of",
    "Chain",
    "CorridorPath",
    "ChainSketch",
    "build_chain_sketch",
    "assemble_corepolygons",
    "simple_sketch",
    "approx_shortest_path_simple",
]

RECT = -1


@dataclass(frozen=True)
class Triangulation:
    points: np.ndarray  # (N, 2); obstacle vertices in order, then the 4 rectangle corners
    owner: np.ndarray  # obstacle index per point, RECT for corners
    local: np.ndarray  # index of the point within its obstacle (or corner number)
    sizes: tuple[int, ...]  # vertex count per obstacle
    triangles: np.ndarray  # (T, 3) counterclockwise vertex ids
    neighbors: np.ndarray  # (T, 3) triangle across the edge opposite corner k, -1 if none
    diagonal: np.ndarray  # (T, 3) True if the edge opposite corner k is a diagonal

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def area(self) -> float:
        p = self.points[self.triangles]
        a, b, c = p[:, 0], p[:, 1], p[:, 2]
        return float(0.5 * np.sum((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])))

    def is_boundary_edge(self, u: int, v: int) -> bool:
        """True for obstacle edges and rectangle edges."""
        ou, ov = self.owner[u], self.owner[v]
        if ou != ov:
            return False
        n = 4 if ou == RECT else self.sizes[ou]
        d = (self.local[u] - self.local[v]) % n
        return d == 1 or d == n - 1

    def point(self, i: int) -> Point:
        return Point(*self.points[i])


def triangulate_free_space(domain: PolygonalDomain) -> Triangulation:
    """Constrained Delaunay triangulation of the rectangle minus the obstacles."""
    import shapely
    from shapely.geometry import Polygon

    xmin, ymin, xmax, ymax = domain.bounding_rect
    corners = np.array([[xmin, ymin], [xmax, ymin], [xmax, ymax], [xmin, ymax]], dtype=float)
    coords = [o.coords for o in domain.obstacles] + [corners]
    points = np.vstack(coords)
    owner = np.concatenate([np.full(len(c), i) for i, c in enumerate(coords[:-1])] + [np.full(4, RECT)]).astype(int)
    local = np.concatenate([np.arange(len(c)) for c in coords]).astype(int)
    index = {(float(x), float(y)): i for i, (x, y) in enumerate(points)}
    region = Polygon(corners, [o.coords for o in domain.obstacles])
    tris = []
    for g in shapely.constrained_delaunay_triangles(region).geoms:
        ring = np.asarray(g.exterior.coords)[:3]
        try:
            ids = [index[(float(x), float(y))] for x, y in ring]
        except KeyError as exc:
            raise RuntimeError("triangulation introduced a vertex not in the domain") from exc
        if orient2d(points[ids[0]], points[ids[1]], points[ids[2]]) < 0:
            ids = [ids[0], ids[2], ids[1]]
        tris.append(ids)
    triangles = np.array(tris, dtype=int).reshape(-1, 3)
    sizes = tuple(o.n for o in domain.obstacles)
    tri = Triangulation(points, owner, local, sizes, triangles, np.full(triangles.shape, -1), np.zeros(triangles.shape, bool))
    edge_map: dict[tuple[int, int], tuple[int, int]] = {}
    for ti, (a, b, c) in enumerate(triangles):
        for k, (u, v) in enumerate(((b, c), (c, a), (a, b))):
            key = (min(u, v), max(u, v))
            if key in edge_map:
                tj, kj = edge_map.pop(key)
                tri.neighbors[ti, k] = tj
                tri.neighbors[tj, kj] = ti
            else:
                edge_map[key] = (ti, k)
            tri.diagonal[ti, k] = not tri.is_boundary_edge(u, v)
    return tri


def locate_triangle(tri: Triangulation, p) -> int:
    """Lowest-numbered triangle whose closure contains ``p``."""
    P = tri.points[tri.triangles]
    inside = np.ones(len(P), bool)
    for k in range(3):
        a, b = P[:, k], P[:, (k + 1) % 3]
        inside &= orient2d_many(a[:, 0], a[:, 1], b[:, 0], b[:, 1], p[0], p[1]) >= 0
    hits = np.flatnonzero(inside)
    if hits.size == 0:
        raise PointInsideObstacle(f"{tuple(p)} is not in free space")
    return int(hits[0])


@dataclass
class Corridor:
    """Dual path between two junction triangles.

    Portals are (left, right) vertex pairs crossed in order, starting with the
    diagonal shared with the first junction. The left side runs a -> b, the
    right side f -> e, so the boundary reads a..b, b-e, e..f, f-a.
    """

    tri: Triangulation = field(repr=False)
    junctions: tuple[int, int]
    triangles: tuple[int, ...]
    portals: tuple[tuple[int, int], ...]

    @property
    def left_chain(self) -> tuple[int, ...]:
        return _dedupe(l for l, _ in self.portals)

    @property
    def right_chain(self) -> tuple[int, ...]:
        return _dedupe(r for _, r in self.portals)

    @property
    def a(self) -> int:
        return self.portals[0][0]

    @property
    def f(self) -> int:
        return self.portals[0][1]

    @property
    def b(self) -> int:
        return self.portals[-1][0]

    @property
    def e(self) -> int:
        return self.portals[-1][1]

    @property
    def is_empty(self) -> bool:
        """Junctions that share a diagonal directly."""
        return not self.triangles

    def boundary(self) -> tuple[int, ...]:
        """Vertex ids around the corridor: chain a..b, then chain e..f."""
        return self.left_chain + self.right_chain[::-1]

    def polygon(self) -> np.ndarray:
        return self.tri.points[list(self.boundary())]


def _dedupe(seq) -> tuple[int, ...]:
    out: list[int] = []
    for v in seq:
        if not out or out[-1] != v:
            out.append(int(v))
    return tuple(out)


@dataclass
class DualGraph3:
    nodes: tuple[int, ...]
    # (junction, junction, corridor index); loops and parallel edges allowed
    edges: list[tuple[int, int, int]]
    pinned: tuple[int, ...] = ()

    def degree(self, node: int) -> int:
        return sum((u == node) + (v == node) for u, v, _ in self.edges)


def _portal(tri: Triangulation, src: int, slot: int) -> tuple[int, int]:
    """(left, right) of the edge opposite corner ``slot`` of ``src`` as seen
    when leaving ``src`` through it."""
    t = tri.triangles[src]
    # src is counterclockwise, so the corner lies left of p->q; leaving it
    # means facing right of p->q, which puts q on the left
    p, q = t[(slot + 1) % 3], t[(slot + 2) % 3]
    return int(q), int(p)


def reduce_to_g3(tri: Triangulation, s=None, t=None) -> tuple[DualGraph3, list[Corridor]]:
    """Prune dead ends, keep junctions (degree three and the s/t triangles),
    and walk the degree-two paths between them into corridors."""
    T = tri.n_triangles
    nbr = tri.neighbors
    pinned = []
    for p in (s, t):
        if p is not None:
            ti = locate_triangle(tri, p)
            if ti not in pinned:
                pinned.append(ti)
    alive = np.ones(T, bool)
    deg = (nbr >= 0).sum(axis=1)
    stack = [i for i in range(T) if deg[i] <= 1 and i not in pinned]
    while stack:
        i = stack.pop()
        if not alive[i] or i in pinned or deg[i] > 1:
            continue
        if deg[i] == 0 and alive.sum() == 1:
            break
        alive[i] = False
        for j in nbr[i]:
            if j >= 0 and alive[j]:
                deg[j] -= 1
                if deg[j] <= 1 and j not in pinned:
                    stack.append(int(j))
    live = np.flatnonzero(alive)
    junction = {int(i) for i in live if deg[i] >= 3} | set(pinned)
    if not junction and live.size:
        junction = {int(live[0])}

    def live_slots(i):
        return [k for k in range(3) if nbr[i, k] >= 0 and alive[nbr[i, k]]]

    used: set[tuple[int, int]] = set()
    corridors: list[Corridor] = []
    edges: list[tuple[int, int, int]] = []
    for j in sorted(junction):
        for k in live_slots(j):
            if (j, k) in used:
                continue
            used.add((j, k))
            portals = [_portal(tri, j, k)]
            prev, cur = j, int(nbr[j, k])
            sleeve: list[int] = []
            while cur not in junction:
                sleeve.append(cur)
                nxt = [kk for kk in live_slots(cur) if nbr[cur, kk] != prev]
                # a degree-two triangle has exactly one way on
                kk = nxt[0]
                portals.append(_portal(tri, cur, kk))
                prev, cur = cur, int(nbr[cur, kk])
            back = [kk for kk in live_slots(cur) if nbr[cur, kk] == prev and (cur, kk) not in used]
            if back:
                used.add((cur, back[0]))
            corridors.append(Corridor(tri, (j, cur), tuple(sleeve), tuple(portals)))
            edges.append((j, cur, len(corridors) - 1))
    return DualGraph3(tuple(sorted(junction)), edges, tuple(pinned)), corridors


def string_pull(points: np.ndarray, start: int, goal: int, portals) -> tuple[int, ...]:
    """Shortest path from ``start`` to ``goal`` through (left, right) portals.

    Works on vertex ids; every bend of the result is a portal endpoint.
    """
    ports = list(portals) + [(goal, goal)]
    P = points

    def ori(a, b, c):
        return orient2d(P[a], P[b], P[c])

    path = [start]
    apex = left = right = start
    apex_i = left_i = right_i = -1
    i = 0
    while i < len(ports):
        pl, pr = ports[i]
        restart = None
        # the right boundary tightens unless pr lies strictly right of it
        if right == apex or ori(apex, right, pr) >= 0:
            if pr == apex or left == apex or ori(apex, left, pr) < 0:
                right, right_i = pr, i
            else:
                restart = (left, left_i)
        if restart is None and (left == apex or ori(apex, left, pl) <= 0):
            if pl == apex or right == apex or ori(apex, right, pl) > 0:
                left, left_i = pl, i
            else:
                restart = (right, right_i)
        if restart is None:
            i += 1
            continue
        apex, apex_i = restart
        path.append(apex)
        left = right = apex
        left_i = right_i = apex_i
        i = apex_i + 1
    path.append(goal)
    return _dedupe(path)


class HourglassKind(str, Enum):
    OPEN = "open"
    CLOSED = "closed"


@dataclass(frozen=True)
class Funnel:
    apex: int
    # each side runs from its base vertex to the apex
    sides: tuple[tuple[int, ...], tuple[int, ...]]
    pseudo_apices: tuple[int, int]


@dataclass
class Hourglass:
    corridor: Corridor = field(repr=False)
    kind: HourglassKind
    side_ab: tuple[int, ...]
    side_ef: tuple[int, ...]
    corridor_path: tuple[int, ...] = ()
    funnels: tuple[Funnel, ...] = ()
    # apices y (near a, f) and x (near b, e) for closed hourglasses
    apices: tuple[int, int] | None = None

    def length(self, ids) -> float:
        p = self.corridor.tri.points[list(ids)]
        return float(np.sum(np.hypot(*np.diff(p, axis=0).T))) if len(ids) > 1 else 0.0


def _pseudo_apex(tri: Triangulation, side: tuple[int, ...]) -> int:
    own = tri.owner[side[0]]
    last = side[0]
    for v in side[1:]:
        if tri.owner[v] != own:
            break
        last = v
    return last


def _paths_meet(points: np.ndarray, p: tuple[int, ...], q: tuple[int, ...]) -> bool:
    if set(p) & set(q):
        return True
    for a, b in zip(p, p[1:]):
        for c, d in zip(q, q[1:]):
            if segments_intersect((points[a], points[b]), (points[c], points[d])):
                return True
    return False


def hourglass_of(corridor: Corridor) -> Hourglass:
    tri = corridor.tri
    inner = corridor.portals[1:-1]
    side_ab = string_pull(tri.points, corridor.a, corridor.b, inner)
    rev = [(r, l) for l, r in reversed(inner)]
    side_ef = string_pull(tri.points, corridor.e, corridor.f, rev)
    if corridor.is_empty or not _paths_meet(tri.points, side_ab, side_ef):
        return Hourglass(corridor, HourglassKind.OPEN, side_ab, side_ef)
    shared = set(side_ab) & set(side_ef)
    if not shared:
        # sides cross without a common vertex; no corridor path to report
        return Hourglass(corridor, HourglassKind.CLOSED, side_ab, side_ef)
    pos = [i for i, v in enumerate(side_ab) if v in shared]
    iy, ix = pos[0], pos[-1]
    y, x = side_ab[iy], side_ab[ix]
    jx, jy = side_ef.index(x), side_ef.index(y)
    if jx > jy:
        # the shared vertices come in opposite order; keep the a-side order
        jx, jy = jy, jx
    path_c = side_ab[iy : ix + 1]
    sides_x = (side_ab[ix:][::-1], side_ef[: jx + 1])
    sides_y = (side_ab[: iy + 1], side_ef[jy:][::-1])
    fx = Funnel(x, sides_x, tuple(_pseudo_apex(tri, s) for s in sides_x))
    fy = Funnel(y, sides_y, tuple(_pseudo_apex(tri, s) for s in sides_y))
    return Hourglass(corridor, HourglassKind.CLOSED, side_ab, side_ef, path_c, (fy, fx), (y, x))


# ---------------------------------------------------------------- chain sketch


@dataclass(frozen=True)
class Chain:
    obstacle_id: int
    # local obstacle indices in chain order, and the ones kept
    vertices: tuple[int, ...]
    coreset: tuple[int, ...]
    # (first edge, last edge, subtended angle) along the chain
    patches: tuple[tuple[int, int, float], ...]


@dataclass(frozen=True)
class CorridorPath:
    """Shortcut between two pseudo-apices of one obstacle through a closed
    hourglass; weighted by its length along the hourglass boundary."""

    obstacle_a: int
    obstacle_b: int
    vertex_a: int
    vertex_b: int
    polyline: tuple[Point, ...]
    length: float


@dataclass
class ChainSketch:
    params: EpsilonParams
    chains: dict[int, list[Chain]]
    corridor_paths: list[CorridorPath]
    coresets: dict[int, tuple[int, ...]]

    @property
    def total_coreset_size(self) -> int:
        return sum(len(c) for c in self.coresets.values())


def _patch_chain(coords: np.ndarray, angle: float) -> list[tuple[int, int, float]]:
    if len(coords) < 2:
        return []
    turns = np.abs(exterior_turns(coords, closed=False))
    # the far end of edge i is vertex i+1; the chain end contributes nothing
    return greedy_patch_runs(turns[1:], angle)


def _sketch_side(tri: Triangulation, side: tuple[int, ...], shared: set[int]):
    """Chains (global ids) to patch, plus the (u, v) corridor-path span if any."""
    own = tri.owner[side[0]]
    m = len(side)
    p = 0
    while p + 1 < m and tri.owner[side[p + 1]] == own:
        p += 1
    q = m - 1
    while q - 1 >= 0 and tri.owner[side[q - 1]] == own:
        q -= 1
    pos = [i for i, v in enumerate(side) if v in shared]
    if pos:
        p, q = min(p, pos[0]), max(q, pos[-1])
    if p >= m - 1 or p >= q:
        if p >= m - 1 and not pos:
            return [side], None
        return [side[: p + 1], side[p:]], None
    return [side[: p + 1], side[q:]], (p, q)


def build_chain_sketch(domain: PolygonalDomain, hourglasses: list[Hourglass], params: EpsilonParams) -> ChainSketch:
    chains: dict[int, list[Chain]] = {}
    paths: list[CorridorPath] = []
    core: dict[int, set[int]] = {}
    convex = [isinstance(o, ConvexPolygon) or o.is_convex() for o in domain.obstacles]
    for i, obs in enumerate(domain.obstacles):
        if convex[i]:
            poly = obs if isinstance(obs, ConvexPolygon) else ConvexPolygon(obs.vertices)
            core[i] = set(coreset_of(poly, partition_patches(poly, params, i), i).vertex_indices)
        else:
            core[i] = set()
    seen_paths: set[tuple[int, int, int]] = set()
    for hg in hourglasses:
        tri = hg.corridor.tri
        shared = set(hg.side_ab) & set(hg.side_ef) if hg.kind is HourglassKind.CLOSED else set()
        for side in (hg.side_ab, hg.side_ef):
            k = int(tri.owner[side[0]])
            if k == RECT or convex[k]:
                continue
            pieces, span = _sketch_side(tri, side, shared)
            for piece in pieces:
                piece = tuple(v for v in piece if tri.owner[v] == k)
                if not piece:
                    continue
                runs = _patch_chain(tri.points[list(piece)], params.patch_angle)
                keep = {piece[0], piece[-1]}
                for j, kk, _ in runs:
                    keep.update((piece[j], piece[kk + 1]))
                loc = tuple(int(tri.local[v]) for v in piece)
                cs = tuple(int(tri.local[v]) for v in piece if v in keep)
                chains.setdefault(k, []).append(Chain(k, loc, cs, tuple(runs)))
                core[k].update(cs)
            if span is not None:
                u, v = side[span[0]], side[span[1]]
                poly = tuple(tri.point(w) for w in side[span[0] : span[1] + 1])
                length = float(sum(math.dist(a, b) for a, b in zip(poly, poly[1:])))
                key = (k, min(u, v), max(u, v))
                if length > 0 and key not in seen_paths:
                    seen_paths.add(key)
                    ua, vb = int(tri.local[u]), int(tri.local[v])
                    core[k].update((ua, vb))
                    paths.append(CorridorPath(k, k, ua, vb, poly, length))
    return ChainSketch(params, chains, paths, {k: tuple(sorted(v)) for k, v in core.items()})


# ------------------------------------------------------- corepolygon assembly


def _ring_edges(coords: np.ndarray) -> np.ndarray:
    return np.hstack([coords, np.roll(coords, -1, axis=0)])


def _walk(n: int, u: int, w: int) -> list[int]:
    """Local indices u, u+1, ..., w counterclockwise."""
    out = [u]
    while out[-1] != w:
        out.append((out[-1] + 1) % n)
    return out


def _bad_chords(obs: SimplePolygon, idx: list[int], blockers: np.ndarray, probes: list, tol: Tolerance) -> set[int]:
    n, m = obs.n, len(idx)
    V = obs.coords
    Q = V[idx]
    if m < 3 or _signed_area2_ring(Q) <= 0:
        return set(range(m))
    live = [i for i in range(m) if (idx[(i + 1) % m] - idx[i]) % n != 1]
    bad: set[int] = set()
    E = _ring_edges(Q)
    for i in live:
        a, b = Q[i], Q[(i + 1) % m]
        if blockers.size and _segments_intersect_mask(a[0], a[1], b[0], b[1], blockers).any():
            bad.add(i)
        hit = _segments_intersect_mask(a[0], a[1], b[0], b[1], E)
        hit[[i, (i + 1) % m, (i - 1) % m]] = False
        for j in np.flatnonzero(hit):
            bad.update((i, int(j)))
    if bad:
        return bad
    qpoly = SimplePolygon(Q)
    for p in probes:
        if qpoly.locate(p, tol) <= 0:
            continue
        found = False
        for i in live:
            ring = V[_walk(n, idx[i], idx[(i + 1) % m])]
            if _crossing_parity(p, _ring_edges(ring)):
                bad.add(i)
                found = True
        if not found:
            bad.update(live)
    return bad


def _signed_area2_ring(c: np.ndarray) -> float:
    x, y = c[:, 0], c[:, 1]
    return float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def assemble_corepolygons(
    domain: PolygonalDomain,
    chain_sketch: ChainSketch,
    keep_out=(),
    tol: Tolerance = DEFAULT_TOL,
) -> Sketch:
    """Corepolygons from coresets; non-convex ones are joined in boundary
    order and refined until they are simple, disjoint from every other
    obstacle and corepolygon, and do not swallow ``keep_out`` points."""
    params = chain_sketch.params
    obstacles = [
        o if isinstance(o, ConvexPolygon) or not o.is_convex() else ConvexPolygon(o.vertices) for o in domain.obstacles
    ]
    domain = PolygonalDomain(obstacles, domain.bounding_rect)
    reps = [Point(*o.vertices[0]) for o in obstacles]
    corepolys: list[Corepolygon | None] = [None] * len(obstacles)
    patches: list[list[Patch]] = [[] for _ in obstacles]
    for i, obs in enumerate(obstacles):
        if isinstance(obs, ConvexPolygon):
            patches[i] = partition_patches(obs, params, i)
            corepolys[i] = _hull_of_coreset(obs, Coreset(i, chain_sketch.coresets[i]), i)
    for j, obs in enumerate(obstacles):
        if corepolys[j] is not None:
            continue
        idx = sorted(set(chain_sketch.coresets.get(j, ())))
        if len(idx) < 3:
            idx = list(range(obs.n))
        others = [o.edges() for k, o in enumerate(obstacles) if k != j]
        others += [c.polygon.edges() for k, c in enumerate(corepolys) if k != j and c is not None and not isinstance(obstacles[k], ConvexPolygon)]
        blockers = np.vstack(others) if others else np.zeros((0, 4))
        probes = [Point(*p) for p in keep_out] + [r for k, r in enumerate(reps) if k != j]
        while True:
            bad = _bad_chords(obs, idx, blockers, probes, tol)
            if not bad:
                break
            add = set()
            m = len(idx)
            for i in bad:
                u, w = idx[i], idx[(i + 1) % m]
                gap = (w - u) % obs.n
                if gap > 1:
                    add.add((u + gap // 2) % obs.n)
            if not add:
                idx = list(range(obs.n))
                break
            idx = sorted(set(idx) | add)
        if len(idx) == obs.n:
            corepolys[j] = Corepolygon(j, obs, tuple(range(obs.n)))
        else:
            corepolys[j] = Corepolygon(j, SimplePolygon(obs.coords[idx]), tuple(idx))
    coresets = [Coreset(i, c.original_indices) for i, c in enumerate(corepolys)]
    mapping = {(i, k): v for i, c in enumerate(corepolys) for k, v in enumerate(c.original_indices)}
    return Sketch(params, domain, list(corepolys), coresets, mapping, patches, list(chain_sketch.corridor_paths))


# -------------------------------------------------------------- full pipeline


def simple_sketch(domain: PolygonalDomain, s, t, params: EpsilonParams, tol: Tolerance = DEFAULT_TOL) -> Sketch:
    tri = triangulate_free_space(domain)
    _, corridors = reduce_to_g3(tri, s, t)
    hgs = [hourglass_of(c) for c in corridors]
    chain_sketch = build_chain_sketch(domain, hgs, params)
    return assemble_corepolygons(domain, chain_sketch, (s, t), tol)


def approx_shortest_path_simple(domain: PolygonalDomain, s, t, eps: float, tol: Tolerance = DEFAULT_TOL) -> PathResult:
    """(1+eps)-approximate shortest path amid simple-polygon obstacles."""
    if all(isinstance(o, ConvexPolygon) or o.is_convex() for o in domain.obstacles):
        return approx_shortest_path_convex(domain.convexified(), s, t, eps, tol)
    s, t = Point(*s), Point(*t)
    for p in (s, t):
        if domain.obstacle_containing(p, tol) is not None or not domain.inside_rect(p):
            raise PointInsideObstacle(f"{tuple(p)} is not in free space")
    if s == t:
        return PathResult(0.0, PolyPath((s, t)), None, [])
    if segment_visible((s, t), domain, tol):
        line = PolyPath((s, t), (SegmentKind.TANGENT,))
        return PathResult(dist(s, t), line, line, [])
    params = make_params(eps, Mode.SINGLE_SHOT)
    sketch = simple_sketch(domain, s, t, params, tol)
    g = build_spanner(sketch, spanner_family(params), tol)
    g, si = insert_query_point(g, s, tol, copy=False)
    g, ti = insert_query_point(g, t, tol, copy=False)
    d, nodes = dijkstra(g, si, ti)
    if not math.isfinite(d):
        raise Unreachable("s and t are not connected in free space")
    sk_path = g.expand(nodes)
    lifted = lift_path(sk_path, sketch.domain, sketch.reduced_domain, tol)
    return PathResult(lifted.length, lifted, sk_path, nodes)
