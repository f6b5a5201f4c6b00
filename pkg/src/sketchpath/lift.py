"""Turning a path that is valid amid the corepolygons into one valid amid the
original obstacles."""

from __future__ import annotations

import heapq
import math
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InvalidInputPath
from .geometry import (
    DEFAULT_TOL,
    ConvexPolygon,
    Point,
    PolygonalDomain,
    PolyPath,
    SegmentKind,
    SimplePolygon,
    Tolerance,
    _chain_eval,
    boundary_geodesic,
    convex_hull,
    dist,
    segment_convex_intersection,
    segment_visible,
)

__all__ = [
    "PolyPath",
    "Crossing",
    "sweep_tangent_intersections",
    "bruteforce_intersections",
    "lift_path",
    "validate_path",
]


class Crossing(NamedTuple):
    segment_id: int
    obstacle_id: int
    entry: Point
    exit: Point


def _hulls(domain: PolygonalDomain) -> list[ConvexPolygon]:
    out = []
    for o in domain.obstacles:
        out.append(o if isinstance(o, ConvexPolygon) else convex_hull(o.vertices))
    return out


def _record(seg, poly: ConvexPolygon, sid: int, oid: int, tol: Tolerance):
    hit = segment_convex_intersection(seg, poly)
    if hit is None or dist(*hit) <= tol.eps_abs:
        return None
    return Crossing(sid, oid, hit[0], hit[1])


def bruteforce_intersections(tangents: Sequence, domain: PolygonalDomain, tol: Tolerance = DEFAULT_TOL) -> list[Crossing]:
    """All-pairs reference for :func:`sweep_tangent_intersections`."""
    hulls = _hulls(domain)
    out = []
    for sid, seg in enumerate(tangents):
        for oid, poly in enumerate(hulls):
            rec = _record(seg, poly, sid, oid, tol)
            if rec is not None:
                out.append(rec)
    return out


def _segment_crossings_x(segs: np.ndarray) -> list[float]:
    """x-coordinates where two segments properly cross."""
    m = len(segs)
    if m < 2:
        return []
    i, j = np.triu_indices(m, 1)
    a, b = segs[i], segs[j]
    r = a[:, 2:] - a[:, :2]
    s = b[:, 2:] - b[:, :2]
    den = r[:, 0] * s[:, 1] - r[:, 1] * s[:, 0]
    qp = b[:, :2] - a[:, :2]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (qp[:, 0] * s[:, 1] - qp[:, 1] * s[:, 0]) / den
        u = (qp[:, 0] * r[:, 1] - qp[:, 1] * r[:, 0]) / den
    ok = (den != 0) & (t > 0) & (t < 1) & (u > 0) & (u < 1)
    return (a[ok, 0] + t[ok] * r[ok, 0]).tolist()


def sweep_tangent_intersections(
    tangents: Sequence, domain: PolygonalDomain, tol: Tolerance = DEFAULT_TOL
) -> list[Crossing]:
    """Segment/obstacle crossing intervals by a left-to-right slab sweep.

    Events are obstacle x-extremes, segment endpoints, segment/segment
    crossings and every entry or exit point discovered so far. Inside a slab
    the vertical order of segments and obstacle chains is fixed, so only
    neighbours in that order (and segments enclosed by an obstacle) must be
    tested; a missed pair always hides behind a tested one whose discovered
    points then split the slab. Non-convex obstacles are swept by their hulls.
    """
    hulls = _hulls(domain)
    segs = np.array([[s[0][0], s[0][1], s[1][0], s[1][1]] for s in tangents], dtype=float).reshape(-1, 4)
    # orient every segment left to right
    flip = segs[:, 0] > segs[:, 2]
    segs[flip] = segs[flip][:, [2, 3, 0, 1]]
    found: dict[tuple[int, int], Crossing | None] = {}

    def test(sid, oid):
        key = (sid, oid)
        if key in found:
            return None
        rec = _record(tangents[sid], hulls[oid], sid, oid, tol)
        found[key] = rec
        return rec

    events = set()
    for poly in hulls:
        x0, _, x1, _ = poly.bbox
        events.update((x0, x1))
    events.update(segs[:, 0].tolist())
    events.update(segs[:, 2].tolist())
    events.update(_segment_crossings_x(segs))
    heap = sorted(events)
    queued = set(heap)

    vertical = np.flatnonzero(segs[:, 0] == segs[:, 2])
    for sid in vertical:
        x = segs[sid, 0]
        ylo, yhi = sorted((segs[sid, 1], segs[sid, 3]))
        for oid, poly in enumerate(hulls):
            x0, y0, x1, y1 = poly.bbox
            if x0 <= x <= x1 and y0 <= yhi and ylo <= y1:
                test(int(sid), oid)

    slanted = np.flatnonzero(segs[:, 0] < segs[:, 2])
    boxes = np.array([p.bbox for p in hulls]).reshape(-1, 4)
    slope = np.zeros(len(segs))
    slope[slanted] = (segs[slanted, 3] - segs[slanted, 1]) / (segs[slanted, 2] - segs[slanted, 0])
    prev_x = heapq.heappop(heap) if heap else None
    while heap:
        x = heap[0]
        if x > prev_x and _process_slab(0.5 * (prev_x + x), segs, slanted, slope, hulls, boxes, test, heap, queued, prev_x, x):
            continue  # the slab was split; sweep its left part first
        heapq.heappop(heap)
        prev_x = x
    return sorted((r for r in found.values() if r is not None), key=lambda r: (r.segment_id, r.obstacle_id))


def _process_slab(xm, segs, slanted, slope, hulls, boxes, test, heap, queued, x_left, x_right) -> bool:
    """Test neighbour pairs in one slab; True if discovered points split it."""
    active_s = slanted[(segs[slanted, 0] < xm) & (segs[slanted, 2] > xm)]
    active_p = np.flatnonzero((boxes[:, 0] < xm) & (boxes[:, 2] > xm)) if len(boxes) else []
    if len(active_s) == 0 or len(active_p) == 0:
        return False
    markers = []  # (y, kind, id): kind 0 = obstacle low, 1 = segment, 2 = obstacle high
    for oid in active_p:
        lx, ly, ux, uy = hulls[oid].chains(False)
        markers.append((_chain_eval(lx, ly, xm), 0, int(oid)))
        markers.append((_chain_eval(ux, uy, xm), 2, int(oid)))
    for sid in active_s:
        markers.append((segs[sid, 1] + slope[sid] * (xm - segs[sid, 0]), 1, int(sid)))
    markers.sort()
    inside = None
    new_points = []
    for k, (y, kind, ident) in enumerate(markers):
        if kind == 0:
            inside = ident
        elif kind == 2:
            inside = None
        else:
            cands = []
            if inside is not None:
                cands.append(inside)
            # overlapping collinear segments never cross, so a run of them
            # shares the neighbours of the whole run
            gap = 1e-9 * (1.0 + abs(y))
            for step in (-1, 1):
                nb = k + step
                while 0 <= nb < len(markers) and markers[nb][1] == 1 and abs(markers[nb][0] - y) <= gap:
                    nb += step
                if 0 <= nb < len(markers) and markers[nb][1] != 1:
                    cands.append(markers[nb][2])
            for oid in cands:
                rec = test(ident, oid)
                if rec is not None:
                    new_points.extend((rec.entry[0], rec.exit[0]))
    split = False
    for px in new_points:
        if px > x_left and px not in queued:
            queued.add(px)
            heapq.heappush(heap, px)
            split |= px < x_right
    return split


# ---------------------------------------------------------------- lifting


def _simple_intervals(seg, poly: SimplePolygon, tol: Tolerance) -> list[tuple[float, float]]:
    """Parameter intervals of ``seg`` lying in the closed simple polygon."""
    a, b = seg
    L = dist(a, b)
    if L <= tol.eps_abs:
        return []
    e = poly.edges()
    ax, ay = a
    dx, dy = b[0] - a[0], b[1] - a[1]
    ex, ey = e[:, 2] - e[:, 0], e[:, 3] - e[:, 1]
    den = dx * ey - dy * ex
    qx, qy = e[:, 0] - ax, e[:, 1] - ay
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (qx * ey - qy * ex) / den
        u = (qx * dy - qy * dx) / den
    ok = (den != 0) & (t >= 0) & (t <= 1) & (u >= -1e-12) & (u <= 1 + 1e-12)
    ts = [0.0, 1.0] + t[ok].tolist()
    # vertices on the segment also split it
    vx, vy = poly.coords[:, 0] - ax, poly.coords[:, 1] - ay
    along = (vx * dx + vy * dy) / (L * L)
    off = np.abs(vx * dy - vy * dx) / L
    on = (off <= tol.eps_abs) & (along > 0) & (along < 1)
    ts += along[on].tolist()
    ts = np.unique(np.clip(ts, 0, 1))
    out = []
    for t0, t1 in zip(ts[:-1], ts[1:]):
        if (t1 - t0) * L <= tol.eps_abs:
            continue
        tm = 0.5 * (t0 + t1)
        m = (ax + tm * dx, ay + tm * dy)
        if poly.locate(m, tol) > 0:
            if out and abs(out[-1][1] - t0) * L <= tol.eps_abs:
                out[-1] = (out[-1][0], float(t1))
            else:
                out.append((float(t0), float(t1)))
    return out


def _param(seg, p) -> float:
    a, b = seg
    dx, dy = b[0] - a[0], b[1] - a[1]
    ll = dx * dx + dy * dy
    if ll == 0:
        return 0.0
    return min(1.0, max(0.0, ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / ll))


def _crossing_intervals(path: PolyPath, domain: PolygonalDomain, tol: Tolerance):
    """Merged (u_start, u_end, obstacle, entry, exit) in path arc length."""
    segs = path.segments
    cum = np.concatenate([[0.0], np.cumsum([dist(*s) for s in segs])])
    raw: list[tuple[float, float, int, Point, Point]] = []
    for rec in sweep_tangent_intersections(segs, domain, tol):
        seg = segs[rec.segment_id]
        poly = domain.obstacles[rec.obstacle_id]
        L = cum[rec.segment_id + 1] - cum[rec.segment_id]
        if isinstance(poly, ConvexPolygon):
            pieces = [(_param(seg, rec.entry), _param(seg, rec.exit))]
        else:
            pieces = _simple_intervals(seg, poly, tol)
        for t0, t1 in pieces:
            if t0 > t1:
                t0, t1 = t1, t0
            if (t1 - t0) * L <= tol.eps_abs:
                continue
            u0 = cum[rec.segment_id] + t0 * L
            u1 = cum[rec.segment_id] + t1 * L
            p0 = _at(seg, t0)
            p1 = _at(seg, t1)
            raw.append((u0, u1, rec.obstacle_id, p0, p1))
    raw.sort(key=lambda r: (r[2], r[0]))
    merged: list[list] = []
    for r in raw:
        if merged and merged[-1][2] == r[2] and r[0] <= merged[-1][1] + tol.eps_abs:
            if r[1] > merged[-1][1]:
                merged[-1][1] = r[1]
                merged[-1][4] = r[4]
        else:
            merged.append(list(r))
    merged.sort(key=lambda r: r[0])
    return merged, cum


def _at(seg, t):
    a, b = seg
    if t <= 0:
        return Point(*a)
    if t >= 1:
        return Point(*b)
    return Point(a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))


def _point_at_u(path: PolyPath, cum, u):
    i = int(np.searchsorted(cum, u, side="right") - 1)
    i = min(max(i, 0), len(path.waypoints) - 2)
    L = cum[i + 1] - cum[i]
    t = 0.0 if L == 0 else (u - cum[i]) / L
    return i, _at(path.segments[i], t)


def _local_geodesic(domain: PolygonalDomain, k: int, p, q, tol: Tolerance) -> PolyPath:
    """Shortest path from p to q around obstacle k, among its own vertices.

    Used for non-convex obstacles where the shorter boundary walk can be far
    from optimal; falls back to the boundary walk.
    """
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import dijkstra as sp_dijkstra

    poly = domain.obstacles[k]
    walk = boundary_geodesic(poly, p, q, tol)
    if segment_visible((p, q), domain, tol):
        return PolyPath((p, q), (SegmentKind.BOUNDARY,))
    convex = poly.turn_signs() > 0
    verts = [p, q] + [poly.vertices[i] for i in np.flatnonzero(convex)]
    m = len(verts)
    rows, cols, w = [], [], []
    for i in range(m):
        for j in range(i + 1, m):
            if segment_visible((verts[i], verts[j]), domain, tol):
                rows.append(i)
                cols.append(j)
                w.append(max(dist(verts[i], verts[j]), 1e-300))
    if not rows:
        return walk
    mat = coo_matrix((w, (rows, cols)), shape=(m, m)).tocsr()
    d, pred = sp_dijkstra(mat, directed=False, indices=0, return_predecessors=True)
    if not math.isfinite(d[1]) or d[1] >= walk.length:
        return walk
    order = [1]
    while order[-1] != 0:
        order.append(int(pred[order[-1]]))
    wps = tuple(verts[i] for i in reversed(order))
    return PolyPath(wps, (SegmentKind.BOUNDARY,) * (len(wps) - 1))


def lift_path(
    path: PolyPath,
    domain: PolygonalDomain,
    reduced: PolygonalDomain | None = None,
    tol: Tolerance = DEFAULT_TOL,
    check: bool = True,
) -> PolyPath:
    """Replace every stretch of ``path`` inside an obstacle by a detour.

    Convex obstacles get the shorter boundary walk between the entry and
    exit points. ``reduced`` is the domain the path is claimed valid in.
    """
    path = path.simplified()
    if len(path.waypoints) < 2:
        return path
    if check and reduced is not None:
        for (a, b), kind in zip(path.segments, path.segment_kinds):
            # corridor polylines are valid amid the real obstacles already
            if kind is SegmentKind.CORRIDOR:
                continue
            if not segment_visible((a, b), reduced, tol):
                raise InvalidInputPath(f"segment {tuple(a)}-{tuple(b)} crosses a corepolygon")
    intervals, cum = _crossing_intervals(path, domain, tol)
    if not intervals:
        return path
    out_w = [path.waypoints[0]]
    out_k: list[SegmentKind] = []
    cursor = 0.0
    cur_seg = 0

    def emit_until(u, point):
        nonlocal cur_seg
        i, _ = _point_at_u(path, cum, u)
        while cur_seg < i:
            out_w.append(path.waypoints[cur_seg + 1])
            out_k.append(path.segment_kinds[cur_seg])
            cur_seg += 1
        out_w.append(point)
        out_k.append(path.segment_kinds[min(cur_seg, len(path.segment_kinds) - 1)])

    for u0, u1, k, p0, p1 in intervals:
        if u0 < cursor - tol.eps_abs:
            continue
        emit_until(u0, p0)
        poly = domain.obstacles[k]
        if isinstance(poly, ConvexPolygon):
            detour = boundary_geodesic(poly, p0, p1, tol)
        else:
            detour = _local_geodesic(domain, k, p0, p1, tol)
        out_w.extend(detour.waypoints[1:])
        out_k.extend(detour.segment_kinds)
        cursor = u1
        cur_seg, _ = _point_at_u(path, cum, u1)
    while cur_seg < len(path.waypoints) - 1:
        out_w.append(path.waypoints[cur_seg + 1])
        out_k.append(path.segment_kinds[cur_seg])
        cur_seg += 1
    return PolyPath(tuple(out_w), tuple(out_k)).simplified()


def validate_path(path: PolyPath, domain: PolygonalDomain, tol: Tolerance = DEFAULT_TOL) -> bool:
    wps = path.waypoints
    if not wps:
        return False
    if any(not domain.in_free_space(p, tol) for p in (wps[0], wps[-1])):
        return False
    return all(segment_visible(s, domain, tol) for s in path.segments)
