"""Planar primitives shared by every pipeline stage.

All combinatorial decisions (turns, crossings, convexity) go through the
robust :func:`orient2d`; floating comparisons are only used for constructed
points, which are snapped to boundaries within ``Tolerance.eps_abs``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    DegenerateInput,
    GeometryError,
    PointInsidePolygon,
    PointNotOnBoundary,
)
from .predicates import orient2d, orient2d_many

__all__ = [
    "Point",
    "Segment",
    "Tolerance",
    "DEFAULT_TOL",
    "SegmentKind",
    "PolyPath",
    "SimplePolygon",
    "ConvexPolygon",
    "PolygonalDomain",
    "orient2d",
    "convex_hull",
    "tangents_from_point",
    "segment_convex_intersection",
    "boundary_geodesic",
    "segment_visible",
    "dist",
]


class _PointFields(NamedTuple):
    x: float
    y: float


class Point(_PointFields):
    __slots__ = ()

    def __new__(cls, x, y):
        x = float(x)
        y = float(y)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise GeometryError(f"non-finite coordinate ({x}, {y})")
        return super().__new__(cls, x, y)


class Segment(NamedTuple):
    a: Point
    b: Point


@dataclass(frozen=True)
class Tolerance:
    eps_abs: float = 1e-9
    eps_rel: float = 1e-12

    def __post_init__(self):
        if not (self.eps_abs > 0 and self.eps_rel > 0):
            raise ValueError("tolerances must be positive")


DEFAULT_TOL = Tolerance()


def dist(p, q) -> float:
    return math.hypot(q[0] - p[0], q[1] - p[1])


class SegmentKind(str, Enum):
    TANGENT = "tangent"
    BOUNDARY = "boundary"
    CORRIDOR = "corridor"


@dataclass(frozen=True)
class PolyPath:
    """A polyline with a provenance tag per segment."""

    waypoints: tuple[Point, ...]
    segment_kinds: tuple[SegmentKind, ...] = ()

    def __post_init__(self):
        wps = tuple(Point(*p) for p in self.waypoints)
        object.__setattr__(self, "waypoints", wps)
        kinds = tuple(SegmentKind(k) for k in self.segment_kinds)
        if not kinds:
            kinds = (SegmentKind.TANGENT,) * max(len(wps) - 1, 0)
        if len(kinds) != max(len(wps) - 1, 0):
            raise ValueError("one segment kind per consecutive waypoint pair")
        object.__setattr__(self, "segment_kinds", kinds)

    @property
    def length(self) -> float:
        return sum(dist(p, q) for p, q in zip(self.waypoints, self.waypoints[1:]))

    @property
    def segments(self) -> list[Segment]:
        return [Segment(p, q) for p, q in zip(self.waypoints, self.waypoints[1:])]

    def reversed(self) -> "PolyPath":
        return PolyPath(self.waypoints[::-1], self.segment_kinds[::-1])

    def concat(self, other: "PolyPath") -> "PolyPath":
        if not self.waypoints:
            return other
        if not other.waypoints:
            return self
        if dist(self.waypoints[-1], other.waypoints[0]) > 1e-9:
            raise ValueError("paths do not join")
        return PolyPath(
            self.waypoints + other.waypoints[1:],
            self.segment_kinds + other.segment_kinds,
        )

    @staticmethod
    def join(parts: Iterable["PolyPath"]) -> "PolyPath":
        out = PolyPath(())
        for part in parts:
            out = out.concat(part)
        return out

    def simplified(self, tol: float = 1e-12) -> "PolyPath":
        """Drop zero-length segments."""
        if not self.waypoints:
            return self
        wps = [self.waypoints[0]]
        kinds = []
        for p, k in zip(self.waypoints[1:], self.segment_kinds):
            if dist(wps[-1], p) <= tol:
                continue
            wps.append(p)
            kinds.append(k)
        return PolyPath(tuple(wps), tuple(kinds))


def _signed_area2(coords: np.ndarray) -> float:
    x, y = coords[:, 0], coords[:, 1]
    return float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


class SimplePolygon:
    """A simple polygon with counterclockwise vertex order.

    Clockwise input is reversed. Simplicity is checked in O(n^2) only when
    ``validate`` is true.
    """

    def __init__(self, vertices: Sequence, *, validate: bool = False):
        pts = [Point(*v) for v in vertices]
        deduped = []
        for p in pts:
            if not deduped or p != deduped[-1]:
                deduped.append(p)
        if len(deduped) > 1 and deduped[0] == deduped[-1]:
            deduped.pop()
        if len(deduped) < 3:
            raise DegenerateInput("polygon needs at least 3 distinct vertices")
        coords = np.array(deduped, dtype=float)
        area2 = _signed_area2(coords)
        if area2 == 0:
            raise DegenerateInput("polygon has zero area")
        self.was_clockwise = area2 < 0
        if self.was_clockwise:
            deduped.reverse()
            coords = coords[::-1].copy()
        self.vertices: tuple[Point, ...] = tuple(deduped)
        coords.setflags(write=False)
        self.coords = coords
        if validate and not self.is_simple():
            raise GeometryError("polygon is not simple")

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __getitem__(self, i):
        return self.vertices[i % len(self.vertices)]

    def __repr__(self) -> str:
        return f"{type(self).__name__}({list(map(tuple, self.vertices))!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, SimplePolygon) and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def area(self) -> float:
        return 0.5 * _signed_area2(self.coords)

    def _cached(self, key, fn):
        val = self.__dict__.get(key)
        if val is None:
            val = fn()
            if isinstance(val, np.ndarray):
                val.setflags(write=False)
            self.__dict__[key] = val
        return val

    @property
    def edge_lengths(self) -> np.ndarray:
        def calc():
            d = np.roll(self.coords, -1, axis=0) - self.coords
            return np.hypot(d[:, 0], d[:, 1])

        return self._cached("_edge_lengths", calc)

    @property
    def perimeter(self) -> float:
        return float(self.cumulative[-1])

    @property
    def cumulative(self) -> np.ndarray:
        """Arc length from vertex 0 to each vertex, plus the perimeter."""
        return self._cached("_cumulative", lambda: np.concatenate([[0.0], np.cumsum(self.edge_lengths)]))

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        def calc():
            lo = self.coords.min(axis=0)
            hi = self.coords.max(axis=0)
            return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])

        return self._cached("_bbox", calc)

    def turn_signs(self) -> np.ndarray:
        """orient2d(prev, v, next) per vertex: +1 convex, -1 reflex, 0 flat."""

        def calc():
            c = self.coords
            p = np.roll(c, 1, axis=0)
            q = np.roll(c, -1, axis=0)
            return orient2d_many(p[:, 0], p[:, 1], c[:, 0], c[:, 1], q[:, 0], q[:, 1])

        return self._cached("_turns", calc)

    def is_convex(self) -> bool:
        return bool(np.all(self.turn_signs() >= 0))

    def edges(self) -> np.ndarray:
        """(n, 4) array of edges ``[ax, ay, bx, by]``; edge i joins v_i to v_{i+1}."""
        return self._cached("_edges", lambda: np.hstack([self.coords, np.roll(self.coords, -1, axis=0)]))

    def is_simple(self) -> bool:
        e = self.edges()
        n = len(e)
        for i in range(n):
            ax, ay, bx, by = e[i]
            others = np.arange(i + 2, n if i > 0 else n - 1)
            if others.size == 0:
                continue
            f = e[others]
            if _segments_intersect_mask(ax, ay, bx, by, f).any():
                return False
        return True

    def boundary_distance(self, p) -> float:
        return float(_point_segment_distances(p, self.edges()).min())

    def locate(self, p, tol: Tolerance = DEFAULT_TOL) -> int:
        """+1 strictly inside, 0 on the boundary (within tolerance), -1 outside."""
        e = self.edges()
        if _point_segment_distances(p, e).min() <= tol.eps_abs:
            return 0
        return 1 if _crossing_parity(p, e) else -1

    def contains(self, p, tol: Tolerance = DEFAULT_TOL) -> bool:
        return self.locate(p, tol) >= 0

    def boundary_position(self, p, tol: Tolerance = DEFAULT_TOL) -> tuple[int, float]:
        """(edge index, parameter in [0, 1)) of a boundary point."""
        e = self.edges()
        d, t = _point_segment_distances(p, e, return_t=True)
        i = int(np.argmin(d))
        if d[i] > max(tol.eps_abs, tol.eps_rel * self.perimeter):
            raise PointNotOnBoundary(f"{tuple(p)} is {d[i]:.3g} from the boundary")
        ti = float(t[i])
        if ti >= 1.0:
            return (i + 1) % self.n, 0.0
        return i, max(ti, 0.0)

    def arc_position(self, p, tol: Tolerance = DEFAULT_TOL) -> float:
        """CCW arc length from vertex 0 to boundary point ``p``."""
        i, t = self.boundary_position(p, tol)
        return float(self.cumulative[i] + t * self.edge_lengths[i])

    def point_at(self, s: float) -> Point:
        """Boundary point at CCW arc length ``s`` from vertex 0."""
        per = self.perimeter
        s = s % per
        cum = self.cumulative
        i = int(np.searchsorted(cum, s, side="right") - 1)
        i = min(max(i, 0), self.n - 1)
        length = self.edge_lengths[i]
        t = 0.0 if length == 0 else (s - cum[i]) / length
        a = self.coords[i]
        b = self.coords[(i + 1) % self.n]
        return Point(a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))

    def walk(self, s_from: float, s_to: float) -> list[Point]:
        """Vertices met walking CCW strictly between two arc positions."""
        per = self.perimeter
        cum = self.cumulative[:-1]
        span = (s_to - s_from) % per
        rel = (cum - s_from) % per
        idx = np.flatnonzero((rel > 0) & (rel < span))
        order = idx[np.argsort(rel[idx])]
        return [self.vertices[i] for i in order]


class ConvexPolygon(SimplePolygon):
    """Strictly convex CCW polygon with monotone chains for O(log n) queries."""

    def __init__(self, vertices: Sequence, *, validate: bool = True):
        super().__init__(vertices)
        verts = list(self.vertices)
        changed = True
        while changed and len(verts) >= 3:
            changed = False
            keep = []
            m = len(verts)
            for i in range(m):
                if orient2d(verts[i - 1], verts[i], verts[(i + 1) % m]) != 0:
                    keep.append(verts[i])
            if len(keep) != m:
                verts, changed = keep, True
        if len(verts) < 3:
            raise DegenerateInput("polygon is degenerate after removing collinear vertices")
        if len(verts) != len(self.vertices):
            self.vertices = tuple(verts)
            coords = np.array(verts, dtype=float)
            coords.setflags(write=False)
            self.coords = coords
            for key in ("_edge_lengths", "_cumulative", "_bbox", "_turns", "_edges"):
                self.__dict__.pop(key, None)
        if validate:
            if not np.all(self.turn_signs() > 0):
                raise GeometryError("polygon is not convex")
            d = np.roll(self.coords, -1, axis=0) - self.coords
            ang = np.arctan2(d[:, 1], d[:, 0])
            turns = (np.roll(ang, -1) - ang) % (2 * math.pi)
            if abs(turns.sum() - 2 * math.pi) > 1e-6:
                raise GeometryError("polygon winds more than once")
        self._chains = {False: _monotone_chains(self.coords), True: None}

    def chains(self, swapped: bool):
        """Lower and upper chains in the (x, y) or (y, x) frame."""
        if self._chains[swapped] is None:
            reflected = self.coords[::-1, ::-1].copy()
            self._chains[swapped] = _monotone_chains(reflected)
        return self._chains[swapped]

    def locate(self, p, tol: Tolerance = DEFAULT_TOL) -> int:
        c = self.coords
        q = np.roll(c, -1, axis=0)
        signs = orient2d_many(c[:, 0], c[:, 1], q[:, 0], q[:, 1], p[0], p[1])
        if np.all(signs > 0):
            if self.boundary_distance(p) <= tol.eps_abs:
                return 0
            return 1
        if np.any(signs < 0):
            if self.boundary_distance(p) <= tol.eps_abs:
                return 0
            return -1
        return 0


def _monotone_chains(coords: np.ndarray):
    """Split a CCW convex polygon into x-monotone lower and upper chains."""
    n = len(coords)
    keys_lo = np.lexsort((coords[:, 1], coords[:, 0]))
    il = int(keys_lo[0])  # leftmost, lowest
    keys_hi = np.lexsort((-coords[:, 1], coords[:, 0]))
    il_top = int(keys_hi[0])  # leftmost, highest
    ir = int(np.lexsort((coords[:, 1], -coords[:, 0]))[0])  # rightmost, lowest
    ir_top = int(np.lexsort((-coords[:, 1], -coords[:, 0]))[0])  # rightmost, highest

    def ccw_range(i, j):
        idx = [i]
        while idx[-1] != j:
            idx.append((idx[-1] + 1) % n)
        return idx

    lower = coords[ccw_range(il, ir)]
    upper = coords[ccw_range(ir_top, il_top)][::-1]
    return (lower[:, 0].copy(), lower[:, 1].copy(), upper[:, 0].copy(), upper[:, 1].copy())


def _point_segment_distances(p, e: np.ndarray, return_t: bool = False):
    ax, ay, bx, by = e[:, 0], e[:, 1], e[:, 2], e[:, 3]
    dx = bx - ax
    dy = by - ay
    ll = dx * dx + dy * dy
    with np.errstate(invalid="ignore", divide="ignore"):
        t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / ll
    t = np.where(ll > 0, t, 0.0)
    tc = np.clip(t, 0.0, 1.0)
    d = np.hypot(ax + tc * dx - p[0], ay + tc * dy - p[1])
    if return_t:
        return d, tc
    return d


def _crossing_parity(p, e: np.ndarray) -> bool:
    ax, ay, bx, by = e[:, 0], e[:, 1], e[:, 2], e[:, 3]
    straddle = (ay > p[1]) != (by > p[1])
    if not straddle.any():
        return False
    ax, ay, bx, by = ax[straddle], ay[straddle], bx[straddle], by[straddle]
    # a crossing to the right of p: orientation of (a, b, p) decides the side
    o = orient2d_many(ax, ay, bx, by, p[0], p[1])
    upward = by > ay
    right = np.where(upward, o > 0, o < 0)
    return bool(np.count_nonzero(right) % 2)


def _segments_intersect_mask(ax, ay, bx, by, f: np.ndarray) -> np.ndarray:
    """Closed-segment intersection test of one segment against many."""
    cx, cy, dx, dy = f[:, 0], f[:, 1], f[:, 2], f[:, 3]
    o1 = orient2d_many(ax, ay, bx, by, cx, cy)
    o2 = orient2d_many(ax, ay, bx, by, dx, dy)
    o3 = orient2d_many(cx, cy, dx, dy, ax, ay)
    o4 = orient2d_many(cx, cy, dx, dy, bx, by)
    proper = (o1.astype(int) * o2 < 0) & (o3.astype(int) * o4 < 0)

    def on_seg(px, py, qx, qy, rx, ry, o):
        return (
            (o == 0)
            & (np.minimum(px, qx) <= rx)
            & (rx <= np.maximum(px, qx))
            & (np.minimum(py, qy) <= ry)
            & (ry <= np.maximum(py, qy))
        )

    touch = (
        on_seg(ax, ay, bx, by, cx, cy, o1)
        | on_seg(ax, ay, bx, by, dx, dy, o2)
        | on_seg(cx, cy, dx, dy, ax, ay, o3)
        | on_seg(cx, cy, dx, dy, bx, by, o4)
    )
    return proper | touch


def segments_intersect(s1, s2) -> bool:
    """Closed segments share at least one point."""
    f = np.array([[s2[0][0], s2[0][1], s2[1][0], s2[1][1]]], dtype=float)
    return bool(_segments_intersect_mask(s1[0][0], s1[0][1], s1[1][0], s1[1][1], f)[0])


def segments_cross_properly(s1, s2) -> bool:
    """Interiors cross at a single point with the four endpoints in general position."""
    a, b = s1
    c, d = s2
    o1, o2 = orient2d(a, b, c), orient2d(a, b, d)
    o3, o4 = orient2d(c, d, a), orient2d(c, d, b)
    return o1 * o2 < 0 and o3 * o4 < 0


def convex_hull(points: Iterable) -> ConvexPolygon:
    """Andrew's monotone chain with exact turn tests; collinear points dropped."""
    pts = sorted(set(Point(*p) for p in points))
    if len(pts) < 3:
        raise DegenerateInput("need at least 3 distinct points")

    def half(seq):
        out: list[Point] = []
        for p in seq:
            while len(out) >= 2 and orient2d(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateInput("all points are collinear")
    return ConvexPolygon(hull, validate=False)


def tangents_from_point(p, poly: ConvexPolygon) -> tuple[int, int]:
    """Indices of the (left, right) tangent vertices of ``poly`` seen from ``p``.

    The polygon lies on the right of the ray p->left and on the left of the
    ray p->right. When an edge is collinear with p the farther endpoint wins.
    """
    c = poly.coords
    q = np.roll(c, -1, axis=0)
    o = orient2d_many(c[:, 0], c[:, 1], q[:, 0], q[:, 1], p[0], p[1])
    if np.all(o > 0):
        raise PointInsidePolygon(f"{tuple(p)} is inside the polygon")
    facing = o <= 0
    if facing.all():
        raise PointInsidePolygon(f"{tuple(p)} lies on the polygon boundary")
    n = len(c)
    prev = np.roll(facing, 1)
    starts = np.flatnonzero(facing & ~prev)
    ends = np.flatnonzero(~facing & prev)
    if len(starts) != 1 or len(ends) != 1:
        # p on the boundary can produce fragmented runs
        raise PointInsidePolygon(f"{tuple(p)} is not strictly outside the polygon")
    left = int(starts[0])
    right = int(ends[0]) % n
    return left, right


def _chain_eval(cx: np.ndarray, cy: np.ndarray, x: float) -> float:
    k = int(np.searchsorted(cx, x, side="right")) - 1
    k = min(max(k, 0), len(cx) - 2)
    x0, x1 = cx[k], cx[k + 1]
    if x1 == x0:
        return float(cy[k])
    t = (x - x0) / (x1 - x0)
    return float(cy[k] + t * (cy[k + 1] - cy[k]))


def _concave_support(cx, cy, sign, ax, ay, slope, x_lo, x_hi):
    """Interval of x in [x_lo, x_hi] where sign*(line(x) - chain(x)) >= 0.

    With sign=+1 the chain is the convex lower chain, with sign=-1 the concave
    upper chain; in both cases the function is concave so the set is an interval.
    """
    i0 = int(np.searchsorted(cx, x_lo, side="right"))
    i1 = int(np.searchsorted(cx, x_hi, side="left"))
    m = max(i1 - i0, 0)

    def xs(j):
        if j == 0:
            return x_lo
        if j == m + 1:
            return x_hi
        return float(cx[i0 + j - 1])

    def f(j):
        x = xs(j)
        if j == 0 or j == m + 1:
            yc = _chain_eval(cx, cy, x)
        else:
            yc = float(cy[i0 + j - 1])
        return sign * (ay + slope * (x - ax) - yc)

    last = m + 1
    lo, hi = 0, last
    while lo < hi:
        mid = (lo + hi) // 2
        if f(mid) >= f(mid + 1):
            hi = mid
        else:
            lo = mid + 1
    jmax = lo
    fmax = f(jmax)
    if fmax < 0:
        return None

    def root(j_neg, j_pos):
        fa, fb = f(j_neg), f(j_pos)
        xa, xb = xs(j_neg), xs(j_pos)
        return xa + (xb - xa) * (fa / (fa - fb))

    if f(0) >= 0:
        left = x_lo
    else:
        lo, hi = 0, jmax  # f(lo) < 0 <= f(hi), f increasing on [0, jmax]
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if f(mid) < 0:
                lo = mid
            else:
                hi = mid
        left = root(lo, hi)
    if f(last) >= 0:
        right = x_hi
    else:
        lo, hi = jmax, last  # f(lo) >= 0 > f(hi)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if f(mid) >= 0:
                lo = mid
            else:
                hi = mid
        right = root(hi, lo)
    return left, right


def segment_convex_intersection(seg, poly: ConvexPolygon):
    """First and last points of ``seg`` inside the closed polygon, or None.

    Runs in O(log n) using the polygon's monotone chains; the segment is
    parametrised along its dominant axis.
    """
    a, b = Point(*seg[0]), Point(*seg[1])
    if a == b:
        return (a, a) if poly.locate(a) >= 0 else None
    swapped = abs(b[1] - a[1]) > abs(b[0] - a[0])
    if swapped:
        ax, ay, bx, by = a[1], a[0], b[1], b[0]
    else:
        ax, ay, bx, by = a[0], a[1], b[0], b[1]
    lx, ly, ux, uy = poly.chains(swapped)
    x_lo = max(min(ax, bx), lx[0])
    x_hi = min(max(ax, bx), lx[-1])
    if x_lo > x_hi:
        return None
    slope = (by - ay) / (bx - ax)
    i1 = _concave_support(lx, ly, 1.0, ax, ay, slope, x_lo, x_hi)
    if i1 is None:
        return None
    i2 = _concave_support(ux, uy, -1.0, ax, ay, slope, x_lo, x_hi)
    if i2 is None:
        return None
    lo = max(i1[0], i2[0])
    hi = min(i1[1], i2[1])
    if lo > hi:
        return None
    t_lo = (lo - ax) / (bx - ax)
    t_hi = (hi - ax) / (bx - ax)
    if t_lo > t_hi:
        t_lo, t_hi = t_hi, t_lo
    t_lo = min(max(t_lo, 0.0), 1.0)
    t_hi = min(max(t_hi, 0.0), 1.0)

    def at(t):
        if t == 0.0:
            return a
        if t == 1.0:
            return b
        return Point(a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))

    return at(t_lo), at(t_hi)


def boundary_geodesic(poly: SimplePolygon, p, q, tol: Tolerance = DEFAULT_TOL) -> PolyPath:
    """Shorter of the two boundary walks from ``p`` to ``q`` (CCW on ties)."""
    sp = poly.arc_position(p, tol)
    sq = poly.arc_position(q, tol)
    per = poly.perimeter
    ccw = (sq - sp) % per
    cw = per - ccw if ccw > 0 else 0.0
    p, q = Point(*p), Point(*q)
    if ccw == 0.0:
        return PolyPath((p, q), (SegmentKind.BOUNDARY,))
    if ccw <= cw + tol.eps_abs * 1e-3:
        mids = poly.walk(sp, sq)
    else:
        mids = poly.walk(sq, sp)[::-1]
    wps = (p, *mids, q)
    return PolyPath(wps, (SegmentKind.BOUNDARY,) * (len(wps) - 1))


class PolygonalDomain:
    """Pairwise-disjoint obstacles inside an axis-aligned bounding rectangle."""

    def __init__(self, obstacles: Sequence[SimplePolygon], bounding_rect=None):
        self.obstacles: tuple[SimplePolygon, ...] = tuple(obstacles)
        if bounding_rect is None:
            bounding_rect = _default_rect(self.obstacles)
        xmin, ymin, xmax, ymax = map(float, bounding_rect)
        if not (xmin < xmax and ymin < ymax):
            raise GeometryError("empty bounding rectangle")
        self.bounding_rect = (xmin, ymin, xmax, ymax)
        if self.obstacles:
            self._edges = np.vstack([o.edges() for o in self.obstacles])
            self._edge_owner = np.concatenate(
                [np.full(o.n, i) for i, o in enumerate(self.obstacles)]
            )
            self._edge_local = np.concatenate([np.arange(o.n) for o in self.obstacles])
            self._bboxes = np.array([o.bbox for o in self.obstacles])
        else:
            self._edge_local = np.zeros(0, dtype=int)
            self._edges = np.zeros((0, 4))
            self._edge_owner = np.zeros(0, dtype=int)
            self._bboxes = np.zeros((0, 4))

    @property
    def h(self) -> int:
        return len(self.obstacles)

    @property
    def n(self) -> int:
        return sum(o.n for o in self.obstacles)

    @property
    def edges(self) -> np.ndarray:
        return self._edges

    @property
    def edge_owner(self) -> np.ndarray:
        return self._edge_owner

    @property
    def edge_local(self) -> np.ndarray:
        """Index of each global edge within its own obstacle."""
        return self._edge_local

    def all_convex(self) -> bool:
        return all(o.is_convex() for o in self.obstacles)

    def convexified(self) -> "PolygonalDomain":
        """Same domain with ConvexPolygon obstacles (raises if any is not convex)."""
        if all(isinstance(o, ConvexPolygon) for o in self.obstacles):
            return self
        obs = [o if isinstance(o, ConvexPolygon) else ConvexPolygon(o.vertices) for o in self.obstacles]
        return PolygonalDomain(obs, self.bounding_rect)

    def candidates(self, xmin, ymin, xmax, ymax, pad: float = 0.0) -> np.ndarray:
        b = self._bboxes
        if not len(b):
            return np.zeros(0, dtype=int)
        m = (b[:, 0] <= xmax + pad) & (b[:, 2] >= xmin - pad) & (b[:, 1] <= ymax + pad) & (b[:, 3] >= ymin - pad)
        return np.flatnonzero(m)

    def obstacle_containing(self, p, tol: Tolerance = DEFAULT_TOL) -> int | None:
        """Index of the obstacle whose interior strictly contains ``p``."""
        for i in self.candidates(p[0], p[1], p[0], p[1]):
            if self.obstacles[i].locate(p, tol) > 0:
                return int(i)
        return None

    def in_free_space(self, p, tol: Tolerance = DEFAULT_TOL) -> bool:
        return self.obstacle_containing(p, tol) is None

    def inside_rect(self, p) -> bool:
        xmin, ymin, xmax, ymax = self.bounding_rect
        return xmin <= p[0] <= xmax and ymin <= p[1] <= ymax


def _default_rect(obstacles):
    if not obstacles:
        return (-1.0, -1.0, 1.0, 1.0)
    allc = np.vstack([o.coords for o in obstacles])
    lo = allc.min(axis=0)
    hi = allc.max(axis=0)
    pad = 0.1 * max(hi[0] - lo[0], hi[1] - lo[1], 1.0)
    return (lo[0] - pad, lo[1] - pad, hi[0] + pad, hi[1] + pad)


def segment_visible(seg, domain: PolygonalDomain, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff the open segment avoids every obstacle interior.

    Grazing an edge or passing through a vertex is allowed. Crossings within
    ``tol.eps_abs`` of an endpoint count as touching the boundary.
    """
    a, b = seg
    length = dist(a, b)
    eps = tol.eps_abs
    if length <= eps:
        return domain.in_free_space(a, tol)
    cand = domain.candidates(min(a[0], b[0]), min(a[1], b[1]), max(a[0], b[0]), max(a[1], b[1]), eps)
    if cand.size == 0:
        return True
    mask = np.isin(domain.edge_owner, cand)
    e = domain.edges[mask]
    ax, ay, bx, by = a[0], a[1], b[0], b[1]
    cx, cy, dx, dy = e[:, 0], e[:, 1], e[:, 2], e[:, 3]
    o1 = orient2d_many(ax, ay, bx, by, cx, cy).astype(int)
    o2 = orient2d_many(ax, ay, bx, by, dx, dy).astype(int)
    o3 = orient2d_many(cx, cy, dx, dy, ax, ay).astype(int)
    o4 = orient2d_many(cx, cy, dx, dy, bx, by).astype(int)
    proper = (o1 * o2 < 0) & (o3 * o4 < 0)
    ux, uy = (bx - ax) / length, (by - ay) / length
    splits = [0.0, length]
    if proper.any():
        pc = e[proper]
        # parameter along ab (in length units) of each proper crossing
        ex, ey = pc[:, 2] - pc[:, 0], pc[:, 3] - pc[:, 1]
        denom = ux * ey - uy * ex
        s = ((pc[:, 0] - ax) * ey - (pc[:, 1] - ay) * ex) / denom
        # crossings between segments collinear within eps are grazes
        off_c = np.abs((pc[:, 0] - ax) * uy - (pc[:, 1] - ay) * ux)
        off_d = np.abs((pc[:, 2] - ax) * uy - (pc[:, 3] - ay) * ux)
        el = np.hypot(ex, ey)
        off_a = np.abs(ex * (ay - pc[:, 1]) - ey * (ax - pc[:, 0])) / el
        off_b = np.abs(ex * (by - pc[:, 1]) - ey * (bx - pc[:, 0])) / el
        graze = (np.maximum(off_c, off_d) <= eps) | (np.maximum(off_a, off_b) <= eps)
        # crossings within eps of an edge endpoint pass through that vertex
        hx, hy = ax + s * ux, ay + s * uy
        graze |= np.hypot(hx - pc[:, 0], hy - pc[:, 1]) <= eps
        graze |= np.hypot(hx - pc[:, 2], hy - pc[:, 3]) <= eps
        if np.any((s > eps) & (s < length - eps) & ~graze):
            return False
        splits.extend(s.tolist())
    # vertices lying on (or within eps of) the open segment split it into pieces
    vx = np.concatenate([cx, dx])
    vy = np.concatenate([cy, dy])
    along = (vx - ax) * ux + (vy - ay) * uy
    off = np.abs((vx - ax) * uy - (vy - ay) * ux)
    on = (off <= eps) & (along > eps) & (along < length - eps)
    if on.any():
        splits.extend(along[on].tolist())
    splits = np.unique(np.clip(splits, 0.0, length))
    mids = 0.5 * (splits[:-1] + splits[1:])
    for sm in mids:
        m = (ax + sm * ux, ay + sm * uy)
        for i in cand:
            o = domain.obstacles[i]
            x0, y0, x1, y1 = o.bbox
            if x0 <= m[0] <= x1 and y0 <= m[1] <= y1 and o.locate(m, tol) > 0:
                return False
    return True
