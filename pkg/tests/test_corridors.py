import math

import numpy as np
import pytest
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra as sp_dijkstra
from shapely.geometry import LineString, Polygon

from conftest import regular, square, u_shape
from sketchpath.corridors import (
    HourglassKind,
    approx_shortest_path_simple,
    build_chain_sketch,
    hourglass_of,
    locate_triangle,
    reduce_to_g3,
    simple_sketch,
    string_pull,
    triangulate_free_space,
)
from sketchpath.errors import PointInsideObstacle
from sketchpath.generate import generate_instance, random_free_point
from sketchpath.geometry import PolygonalDomain, orient2d
from sketchpath.lift import validate_path
from sketchpath.oracle import build_visibility_graph, exact_distance
from sketchpath.pipeline import approx_shortest_path_convex
from sketchpath.sketch import make_params


def _polygon_geodesic(pts, ring, a, b):
    """Shortest a-b path inside a simple polygon by all-pairs visibility."""
    poly = Polygon(pts[list(ring)]).buffer(1e-9)
    ids = list(dict.fromkeys(ring))
    rows, cols, w = [], [], []
    for i, u in enumerate(ids):
        for v in ids[i + 1 :]:
            if poly.covers(LineString([pts[u], pts[v]])):
                rows.append(i)
                cols.append(ids.index(v))
                w.append(max(float(np.hypot(*(pts[u] - pts[v]))), 1e-300))
    m = coo_matrix((w, (rows, cols)), shape=(len(ids), len(ids))).tocsr()
    return float(sp_dijkstra(m, directed=False, indices=ids.index(a))[ids.index(b)])


def test_empty_rectangle_two_triangles():
    tri = triangulate_free_space(PolygonalDomain([], (0, 0, 2, 1)))
    assert len(tri.triangles) == 2
    assert tri.area() == pytest.approx(2.0)


def test_square_in_rectangle_triangle_count():
    dom = PolygonalDomain([square(0, 0)], (-1, -1, 2, 2))
    tri = triangulate_free_space(dom)
    assert len(tri.triangles) == 8
    assert tri.area() == pytest.approx(9 - 1)


@pytest.mark.parametrize("seed", range(4))
def test_triangle_count_and_area(seed):
    dom = generate_instance(seed, 6, 15, "simple").domain()
    tri = triangulate_free_space(dom)
    N = dom.n + 4
    assert len(tri.triangles) == N + 2 * dom.h - 2
    x0, y0, x1, y1 = dom.bounding_rect
    free = (x1 - x0) * (y1 - y0) - sum(o.area for o in dom.obstacles)
    assert tri.area() == pytest.approx(free, rel=1e-12)
    # every triangle is counter-clockwise
    P = tri.points
    assert all(orient2d(P[a], P[b], P[c]) > 0 for a, b, c in tri.triangles)


def test_locate_triangle():
    dom = PolygonalDomain([square(0, 0)], (-1, -1, 2, 2))
    tri = triangulate_free_space(dom)
    k = locate_triangle(tri, (-0.5, 0.5))
    assert Polygon(tri.points[list(tri.triangles[k])]).buffer(1e-12).covers(Polygon([(-0.5, 0.5)] * 3).centroid)
    with pytest.raises(PointInsideObstacle):
        locate_triangle(tri, (0.5, 0.5))


def test_g3_shapes():
    one = triangulate_free_space(PolygonalDomain([square(0, 0)], (-1, -1, 2, 2)))
    g, cs = reduce_to_g3(one)
    assert len(g.nodes) == 1 and len(cs) == 1 and g.edges[0][0] == g.edges[0][1]
    two = triangulate_free_space(PolygonalDomain([square(0, 0), square(3, 0)], (-1, -1, 5, 2)))
    g, cs = reduce_to_g3(two)
    assert len(g.nodes) == 2 and len(cs) == 3
    empty = triangulate_free_space(PolygonalDomain([], (0, 0, 1, 1)))
    g, cs = reduce_to_g3(empty, (0.2, 0.8), (0.8, 0.2))
    assert len(cs) == 1


@pytest.mark.parametrize("h", [3, 8])
def test_g3_is_cubic_with_linear_size(h):
    dom = generate_instance(h, h, 20, "simple").domain()
    g, cs = reduce_to_g3(triangulate_free_space(dom))
    assert all(g.degree(j) == 3 for j in g.nodes)
    assert len(g.nodes) == 2 * h - 2
    assert len(cs) == 3 * h - 3


def test_string_pull_simple_bend():
    pts = np.array([[0, 4], [10, 4], [0, 0], [5, 2], [10, 0]], float)
    assert string_pull(pts, 2, 4, [(0, 3), (1, 3)]) == (2, 3, 4)
    assert string_pull(pts, 0, 1, [(0, 3), (1, 3)]) == (0, 1)


def test_hourglass_sides_are_geodesics():
    checked = 0
    for seed in range(3):
        dom = generate_instance(seed, 5, 20, "simple").domain()
        tri = triangulate_free_space(dom)
        _, cs = reduce_to_g3(tri)
        for c in cs:
            if c.is_empty:
                continue
            hg = hourglass_of(c)
            for side, (a, b) in ((hg.side_ab, (c.a, c.b)), (hg.side_ef, (c.e, c.f))):
                assert (side[0], side[-1]) == (a, b)
                if a != b:
                    ref = _polygon_geodesic(tri.points, c.boundary(), a, b)
                    assert hg.length(side) == pytest.approx(ref, abs=1e-7)
                    checked += 1
    assert checked > 20


def test_open_sides_bend_one_way_and_closed_share_vertices():
    kinds = set()
    for seed in range(6):
        dom = generate_instance(seed, 6, 25, "simple").domain()
        tri = triangulate_free_space(dom)
        P = tri.points
        for c in reduce_to_g3(tri)[1]:
            hg = hourglass_of(c)
            kinds.add(hg.kind)
            if hg.kind is HourglassKind.OPEN:
                for side in (hg.side_ab, hg.side_ef):
                    turns = [orient2d(P[u], P[v], P[w]) for u, v, w in zip(side, side[1:], side[2:])]
                    assert all(x >= 0 for x in turns) or all(x <= 0 for x in turns)
            elif hg.apices is not None:
                y, x = hg.apices
                assert y in hg.side_ef and x in hg.side_ef
                assert hg.corridor_path[0] == y and hg.corridor_path[-1] == x
                for f in hg.funnels:
                    assert f.sides[0][-1] == f.apex == f.sides[1][-1]
    assert kinds == {HourglassKind.OPEN, HourglassKind.CLOSED}


def test_corridor_path_weights():
    found = 0
    for seed in (0, 3, 4, 5):
        dom = generate_instance(seed, 4, 60, "simple").domain()
        tri = triangulate_free_space(dom)
        hgs = [hourglass_of(c) for c in reduce_to_g3(tri)[1]]
        ch = build_chain_sketch(dom, hgs, make_params(0.5))
        vg = build_visibility_graph(dom)
        for cp in ch.corridor_paths:
            poly = np.asarray(cp.polyline)
            assert cp.length == pytest.approx(float(np.sum(np.hypot(*np.diff(poly, axis=0).T))))
            a, b = poly[0], poly[-1]
            assert cp.length >= exact_distance(dom, a, b, vg=vg) - 1e-9
            found += 1
    assert found > 0


def test_u_shape_end_to_end():
    dom = PolygonalDomain([u_shape(0, 0, 4, 4, 1), regular(30, 8, 2, 1.5)], (-2, -2, 11, 7))
    s, t = (2.0, 3.5), (2.0, -1.0)
    res = approx_shortest_path_simple(dom, s, t, 0.5)
    exact = exact_distance(dom, s, t)
    assert validate_path(res.path, dom)
    assert exact - 1e-9 <= res.length <= 1.5 * exact + 1e-9


def test_visible_pair_returns_segment():
    dom = PolygonalDomain([u_shape()], (-1, -1, 5, 6))
    res = approx_shortest_path_simple(dom, (2, 2), (2, 5), 0.5)
    assert res.length == 3.0


def test_all_convex_matches_convex_pipeline():
    dom = generate_instance(4, 6, 30).domain()
    rng = np.random.default_rng(1)
    for _ in range(3):
        s, t = random_free_point(dom, rng), random_free_point(dom, rng)
        a = approx_shortest_path_simple(dom, s, t, 0.5).length
        b = approx_shortest_path_convex(dom, s, t, 0.5).length
        assert a == pytest.approx(b, rel=1e-9)


def test_simple_sketch_blocks_only_what_obstacles_block():
    dom = generate_instance(2, 5, 60, "simple").domain()
    rng = np.random.default_rng(2)
    s, t = random_free_point(dom, rng), random_free_point(dom, rng)
    sk = simple_sketch(dom, s, t, make_params(0.5))
    assert sk.total_coreset_size < dom.n
    for q, o in zip(sk.reduced_domain.obstacles, dom.obstacles):
        # chords may close dead-end pockets, but never leave the hull
        assert Polygon(o.vertices).convex_hull.buffer(1e-9).covers(Polygon(q.vertices))
        assert set(map(tuple, q.vertices)) <= set(map(tuple, o.vertices))
    assert sk.reduced_domain.in_free_space(s) and sk.reduced_domain.in_free_space(t)
