import math

import numpy as np
import pytest

from conftest import square
from sketchpath.cones import (
    ConeFamily,
    EdgeKind,
    NodeKind,
    SpannerGraph,
    admissible_cones,
    build_spanner,
    cone_hits,
    dijkstra,
    insert_query_point,
)
from sketchpath.errors import NodeNotFound
from sketchpath.generate import generate_instance
from sketchpath.geometry import ConvexPolygon, Point, PolygonalDomain, segment_visible
from sketchpath.sketch import build_sketch, make_params

TWO_PI = 2 * math.pi


def _in_interval(theta, start, span, slack=1e-9):
    return (theta - start) % TWO_PI <= span + slack or (start - theta) % TWO_PI <= slack


def test_family_partitions_circle():
    fam = ConeFamily(20)
    assert fam.angle * fam.count == pytest.approx(TWO_PI)
    for theta in np.linspace(0, TWO_PI, 97, endpoint=False):
        s, span = fam.interval(fam.index_of(theta))
        assert _in_interval(theta, s, span)


def test_point_obstacle_all_cones():
    assert admissible_cones(None, Point(0, 0), None, ConeFamily(12)) == list(range(12))


def test_square_corner_admissible_matches_interval_oracle():
    fam = ConeFamily(20)
    got = set(admissible_cones(Point(0, 1), Point(0, 0), Point(1, 0), fam))
    # tangent wedges at the corner: [pi/2, pi] and [3pi/2, 2pi]
    wedges = [(math.pi / 2, math.pi), (3 * math.pi / 2, TWO_PI)]
    want = set()
    for c in range(fam.count):
        lo, hi = c * fam.angle, (c + 1) * fam.angle
        for a, b in wedges:
            if min(hi, b) - max(lo, a) > 1e-12:
                want.add(c)
    assert got == want


def test_admissible_total_is_linear_in_k():
    fam = ConeFamily(40)
    poly = ConvexPolygon([(math.cos(t), math.sin(t)) for t in np.linspace(0, TWO_PI, 60, endpoint=False)])
    total = sum(
        len(admissible_cones(poly.vertices[i - 1], poly.vertices[i], poly.vertices[(i + 1) % poly.n], fam))
        for i in range(poly.n)
    )
    assert total <= 4 * fam.count + 2 * poly.n


def test_steiner_point_is_projection():
    dom = PolygonalDomain([square(0, 0), ConvexPolygon([(2, -0.5), (3, -0.5), (3, 0.5), (2, 0.5)])], (-1, -2, 4, 2))
    fam = ConeFamily(20)
    hits = cone_hits(dom, Point(1, 0), [0], fam)
    assert hits[0].obstacle == 1
    assert tuple(hits[0].point) == pytest.approx((2.0, 0.0))
    assert hits[0].distance == pytest.approx(1.0)


def test_cone_in_empty_space_has_no_hit():
    dom = PolygonalDomain([square(0, 0)], (-1, -1, 5, 5))
    fam = ConeFamily(20)
    assert cone_hits(dom, Point(3, 3), [fam.index_of(math.pi / 4)], fam) == {}


def test_single_obstacle_no_cone_edges_and_arcs():
    sk = build_sketch(PolygonalDomain([square(0, 0)], (-1, -1, 2, 2)), make_params(0.5))
    g = build_spanner(sk)
    assert all(e.kind is EdgeKind.BOUNDARY_ARC for e in g.edges)
    assert sorted(e.weight for e in g.edges) == pytest.approx([1, 1, 1, 1])
    g.add_boundary_node(NodeKind.STEINER_POINT, 0, 0.5)
    arcs = sorted(e.weight for e in g.edges)
    assert arcs == pytest.approx([0.5, 0.5, 1, 1, 1])


def test_arc_weights_sum_to_perimeter():
    d = generate_instance(4, 5, 30).domain()
    sk = build_sketch(d, make_params(0.3))
    g = build_spanner(sk)
    for k, poly in enumerate(sk.reduced_domain.obstacles):
        total = sum(e.weight for e in g.arc_edges() if g.nodes[e.u].obstacle == k)
        assert total == pytest.approx(poly.perimeter)


def test_cone_edges_visible_and_inside_their_cone():
    d = generate_instance(2, 6, 25).domain()
    sk = build_sketch(d, make_params(0.5))
    g = build_spanner(sk)
    red = sk.reduced_domain
    cone_edges = [e for e in g.edges if e.kind is EdgeKind.CONE_EDGE]
    assert cone_edges
    for e in cone_edges:
        a, b = g.nodes[e.u].location, g.nodes[e.v].location
        assert segment_visible((a, b), red)
        assert e.weight == pytest.approx(math.dist(a, b))
        theta = math.atan2(b[1] - a[1], b[0] - a[0]) % TWO_PI
        assert _in_interval(theta, *g.family.interval(e.cone), slack=1e-7)


def test_dijkstra_small_cases():
    adj = [[(1, 5.0, 0)], [(0, 5.0, 0)]]
    assert dijkstra(adj, 0, 1) == (5.0, [0, 1])
    assert dijkstra(adj, 1, 1) == (0.0, [])
    with pytest.raises(NodeNotFound):
        dijkstra(adj, 0, 7)
    assert dijkstra([[], []], 0, 1)[0] == math.inf


def test_dijkstra_matches_bellman_ford(rng):
    d = generate_instance(9, 8, 20).domain()
    g = build_spanner(build_sketch(d, make_params(0.5)))
    n = len(g.nodes)
    assert n >= 150
    edges = [(e.u, e.v, e.weight) for e in g.edge_list()]
    src = 0
    bf = [math.inf] * n
    bf[src] = 0.0
    for _ in range(n - 1):
        changed = False
        for u, v, w in edges:
            for a, b in ((u, v), (v, u)):
                if bf[a] + w < bf[b]:
                    bf[b] = bf[a] + w
                    changed = True
        if not changed:
            break
    for t in rng.integers(0, n, size=40):
        got, path = dijkstra(g, src, int(t))
        assert got == pytest.approx(bf[t], rel=1e-12, abs=1e-12)


def test_insert_query_point_reuses_vertex_and_links_points():
    dom = PolygonalDomain([square(0, 0), square(3, 0)], (-2, -2, 6, 3))
    g = build_spanner(build_sketch(dom, make_params(0.5)))
    n0 = len(g.nodes)
    g2, nid = insert_query_point(g, (1.0, 1.0))
    assert len(g2.nodes) == n0
    assert g2.nodes[nid].kind is NodeKind.CORESET_VERTEX
    assert len(g.nodes) == n0  # the original graph is untouched
    g3, a = insert_query_point(g, (-1.5, 2.5))
    g3, b = insert_query_point(g3, (-1.5, 2.0), copy=False)
    direct = [e for e in g3.edges if {e.u, e.v} == {a, b}]
    assert direct and direct[0].weight == pytest.approx(0.5)
