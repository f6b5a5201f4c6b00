"""Ground-truth shortest paths on the tangent visibility graph."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra as sp_dijkstra

from .errors import PointInsideObstacle, Unreachable
from .geometry import DEFAULT_TOL, Point, PolygonalDomain, PolyPath, SegmentKind, Tolerance, dist, segment_visible
from .predicates import orient2d_many

__all__ = ["VisibilityGraph", "build_visibility_graph", "exact_shortest_path", "exact_distance"]


@dataclass
class VisibilityGraph:
    domain: PolygonalDomain
    points: np.ndarray  # (m, 2) node coordinates
    prev_pts: np.ndarray  # polygon neighbours per node, NaN for free points
    next_pts: np.ndarray
    edges: list[tuple[int, int, float]]

    @property
    def n_nodes(self) -> int:
        return len(self.points)


def _tangent_mask(v, pv, nv, w) -> np.ndarray:
    """Line v->w does not enter the polygon locally at v (vectorised over rows)."""
    o1 = orient2d_many(v[:, 0], v[:, 1], w[:, 0], w[:, 1], pv[:, 0], pv[:, 1]).astype(int)
    o2 = orient2d_many(v[:, 0], v[:, 1], w[:, 0], w[:, 1], nv[:, 0], nv[:, 1]).astype(int)
    return o1 * o2 >= 0


def build_visibility_graph(domain: PolygonalDomain, tol: Tolerance = DEFAULT_TOL) -> VisibilityGraph:
    pts, prv, nxt = [], [], []
    for poly in domain.obstacles:
        signs = poly.turn_signs()
        c = poly.coords
        keep = signs > 0  # shortest paths only bend at convex vertices
        pts.append(c[keep])
        prv.append(np.roll(c, 1, axis=0)[keep])
        nxt.append(np.roll(c, -1, axis=0)[keep])
    if pts:
        P, PV, NV = np.vstack(pts), np.vstack(prv), np.vstack(nxt)
    else:
        P = PV = NV = np.zeros((0, 2))
    m = len(P)
    edges: list[tuple[int, int, float]] = []
    if m >= 2:
        iu, ju = np.triu_indices(m, 1)
        ok = _tangent_mask(P[iu], PV[iu], NV[iu], P[ju]) & _tangent_mask(P[ju], PV[ju], NV[ju], P[iu])
        for i, j in zip(iu[ok], ju[ok]):
            a, b = P[i], P[j]
            if segment_visible((a, b), domain, tol):
                edges.append((int(i), int(j), math.hypot(*(b - a))))
    return VisibilityGraph(domain, P, PV, NV, edges)


def _point_edges(vg: VisibilityGraph, p, tol) -> list[tuple[int, float]]:
    P = vg.points
    if len(P) == 0:
        return []
    w = np.broadcast_to(np.asarray(p, dtype=float), P.shape)
    cand = np.flatnonzero(_tangent_mask(P, vg.prev_pts, vg.next_pts, w))
    out = []
    for i in cand:
        if segment_visible((p, P[i]), vg.domain, tol):
            out.append((int(i), dist(p, P[i])))
    return out


def exact_shortest_path(
    domain: PolygonalDomain,
    s,
    t,
    tol: Tolerance = DEFAULT_TOL,
    vg: VisibilityGraph | None = None,
) -> tuple[float, PolyPath]:
    """Exact geodesic distance and a realising polyline.

    Pass a prebuilt ``vg`` to amortise the O(n^2) construction over queries.
    """
    s, t = Point(*s), Point(*t)
    for p in (s, t):
        if domain.obstacle_containing(p, tol) is not None:
            raise PointInsideObstacle(f"{tuple(p)} lies inside an obstacle")
    if s == t:
        return 0.0, PolyPath((s, t))
    if segment_visible((s, t), domain, tol):
        return dist(s, t), PolyPath((s, t), (SegmentKind.TANGENT,))
    if vg is None:
        vg = build_visibility_graph(domain, tol)
    m = vg.n_nodes
    si, ti = m, m + 1
    rows, cols, wts = [], [], []
    for i, j, w in vg.edges:
        rows.append(i)
        cols.append(j)
        wts.append(w)
    for src, idx in ((s, si), (t, ti)):
        for j, w in _point_edges(vg, src, tol):
            rows.append(idx)
            cols.append(j)
            wts.append(w)
    if not rows:
        raise Unreachable("no path between the query points")
    # zero-weight edges would vanish from a sparse matrix
    wts = np.maximum(np.array(wts), 1e-300)
    mat = coo_matrix((wts, (rows, cols)), shape=(m + 2, m + 2)).tocsr()
    d, pred = sp_dijkstra(mat, directed=False, indices=si, return_predecessors=True)
    if not math.isfinite(d[ti]):
        raise Unreachable("no path between the query points")
    order = [ti]
    while order[-1] != si:
        order.append(int(pred[order[-1]]))
    order.reverse()
    coords = [s] + [Point(*vg.points[i]) for i in order[1:-1]] + [t]
    path = PolyPath(tuple(coords))
    return float(path.length), path


def exact_distance(domain, s, t, tol: Tolerance = DEFAULT_TOL, vg=None) -> float:
    return exact_shortest_path(domain, s, t, tol, vg)[0]
