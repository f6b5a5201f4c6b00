import math

import numpy as np
import pytest

from conftest import regular, square
from sketchpath.errors import InvalidInputPath
from sketchpath.generate import generate_instance, random_free_point
from sketchpath.geometry import ConvexPolygon, Point, PolygonalDomain, PolyPath, SegmentKind
from sketchpath.lift import bruteforce_intersections, lift_path, sweep_tangent_intersections, validate_path
from sketchpath.oracle import exact_distance
from sketchpath.pipeline import ConvexSolver
from sketchpath.sketch import build_sketch, make_params


def _key(recs):
    return sorted((r.segment_id, r.obstacle_id, round(r.entry.x, 9), round(r.entry.y, 9), round(r.exit.x, 9), round(r.exit.y, 9)) for r in recs)


def test_square_crossing_record():
    dom = PolygonalDomain([square(0, 0)], (-2, -2, 3, 3))
    (rec,) = sweep_tangent_intersections([((-1, 0.5), (2, 0.5))], dom)
    assert (rec.segment_id, rec.obstacle_id) == (0, 0)
    assert tuple(rec.entry) == pytest.approx((0, 0.5))
    assert tuple(rec.exit) == pytest.approx((1, 0.5))


@pytest.mark.parametrize("seg", [((-1, 1), (1, -1)), ((0, 2), (2, 0)), ((-1, 2), (2, 2))])
def test_vertex_grazes_and_misses_give_no_record(seg):
    dom = PolygonalDomain([square(0, 0)], (-2, -2, 3, 3))
    assert sweep_tangent_intersections([seg], dom) == []


def test_path_along_an_edge_is_unchanged_by_lift():
    dom = PolygonalDomain([square(0, 0)], (-2, -2, 3, 3))
    p = PolyPath(((-1, 1), (2, 1)))
    assert lift_path(p, dom).length == pytest.approx(3.0)
    assert validate_path(lift_path(p, dom), dom)


def test_cap_chord_replaced_by_short_boundary_walk():
    poly = ConvexPolygon(regular(100, 0, 0, 10))
    dom = PolygonalDomain([poly], (-20, -20, 20, 20))
    sk = build_sketch(dom, make_params(0.5))
    eps_p = sk.params.eps_prime
    q = sk.reduced_domain.obstacles[0]
    # a tangent along one corepolygon edge clips a shallow cap of the 100-gon
    a, b = np.asarray(q.vertices[0]), np.asarray(q.vertices[1])
    d = (b - a) / np.linalg.norm(b - a)
    seg = PolyPath((tuple(a - 3 * d), tuple(b + 3 * d)))
    out = lift_path(seg, dom, sk.reduced_domain)
    assert validate_path(out, dom)
    assert seg.length <= out.length <= (1 + eps_p) * seg.length + 1e-9


def test_sweep_matches_bruteforce():
    rng = np.random.default_rng(7)
    for i in range(50):
        conv = "convex" if i % 2 == 0 else "simple"
        dom = generate_instance(100 + i, int(rng.integers(1, 9)), int(rng.integers(4, 15)), conv).domain()
        x0, y0, x1, y1 = dom.bounding_rect
        m = int(rng.integers(1, 30))
        pts = rng.uniform((x0, y0), (x1, y1), size=(m, 2, 2))
        segs = [(tuple(a), tuple(b)) for a, b in pts]
        # a few axis-parallel and vertex-to-vertex segments
        v = np.vstack([o.vertices for o in dom.obstacles])
        segs.append((tuple(v[0]), tuple(v[-1])))
        segs.append(((x0, pts[0, 0, 1]), (x1, pts[0, 0, 1])))
        segs.append(((pts[0, 1, 0], y0), (pts[0, 1, 0], y1)))
        assert _key(sweep_tangent_intersections(segs, dom)) == _key(bruteforce_intersections(segs, dom))


def test_lift_identity_when_free():
    dom = PolygonalDomain([square(0, 0)], (-2, -2, 3, 3))
    p = PolyPath(((-1, -1), (-1, 2), (2, 2)))
    assert lift_path(p, dom).waypoints == p.simplified().waypoints
    assert lift_path(PolyPath(((0.5, 2),)), dom).waypoints == (Point(0.5, 2),)


def test_lift_square_detour():
    dom = PolygonalDomain([square(0, 0)], (-2, -2, 3, 3))
    out = lift_path(PolyPath(((-1, 0.5), (2, 0.5))), dom)
    assert out.length == pytest.approx(4.0)
    assert validate_path(out, dom)
    assert SegmentKind.BOUNDARY in out.segment_kinds


def test_lift_rejects_path_through_reduced_domain():
    dom = PolygonalDomain([square(0, 0)], (-2, -2, 3, 3))
    with pytest.raises(InvalidInputPath):
        lift_path(PolyPath(((-1, 0.5), (2, 0.5))), dom, reduced=dom)


def test_validate_path_false_cases():
    dom = PolygonalDomain([square(0, 0)], (-2, -2, 3, 3))
    assert not validate_path(PolyPath(((-1, 0.5), (2, 0.5))), dom)
    assert not validate_path(PolyPath(((0.5, 0.5), (2, 2))), dom)
    assert not validate_path(PolyPath(()), dom)
    assert validate_path(PolyPath(((-1, 1), (2, 1))), dom)


def test_lift_inflation_bound():
    eps = 0.5
    for seed in range(4):
        dom = generate_instance(seed, 6, 60).domain()
        solver = ConvexSolver(dom, eps)
        eps_p = solver.params.eps_prime
        sk = build_sketch(dom, make_params(eps))
        rng = np.random.default_rng(seed)
        for _ in range(5):
            s, t = random_free_point(dom, rng), random_free_point(dom, rng)
            res = solver.query(s, t)
            assert validate_path(res.path, dom)
            if res.sketch_path is not None:
                # the lift never adds more than the eps' inflation of the sketch
                assert res.length <= (1 + eps_p) * res.sketch_path.length + 1e-9
        assert sk.reduced_domain.h == dom.h


def test_sweep_finds_stacked_copies_of_a_chord():
    poly = regular(12, 0, 0, 2)
    dom = PolygonalDomain([poly, square(3, -0.5)], (-3, -3, 5, 3))
    a, b = poly.vertices[1], poly.vertices[4]
    # the same chord three times, plus a segment passing below it
    segs = [(a, b), (b, a), (a, b), ((-2.5, 2.5), (4.5, 2.5))]
    got = _key(sweep_tangent_intersections(segs, dom))
    assert got == _key(bruteforce_intersections(segs, dom))
    assert {g[0] for g in got} == {0, 1, 2}
