import math

import numpy as np
import pytest

from conftest import grid_distance, square, u_shape
from sketchpath.errors import PointInsideObstacle
from sketchpath.generate import generate_instance, random_free_point
from sketchpath.geometry import PolygonalDomain
from sketchpath.lift import validate_path
from sketchpath.oracle import build_visibility_graph, exact_distance, exact_shortest_path


def test_unit_square_detour():
    dom = PolygonalDomain([square(0, 0)], (-2, -2, 3, 3))
    d, p = exact_shortest_path(dom, (-1, 0.5), (2, 0.5))
    assert d == pytest.approx(1 + 2 * math.sqrt(1.25))
    assert d == pytest.approx(3.2360679775)
    assert validate_path(p, dom)


def test_visible_and_trivial_pairs():
    dom = PolygonalDomain([square(0, 0)], (-2, -2, 3, 3))
    assert exact_distance(dom, (-1, -1), (2, -1)) == pytest.approx(3.0)
    assert exact_distance(dom, (-1, -1), (-1, -1)) == 0.0
    assert exact_distance(PolygonalDomain([], (0, 0, 1, 1)), (0.1, 0.1), (0.9, 0.9)) == pytest.approx(math.sqrt(1.28))
    with pytest.raises(PointInsideObstacle):
        exact_distance(dom, (0.5, 0.5), (2, 2))


def test_reflex_vertices_dropped_from_graph():
    dom = PolygonalDomain([u_shape()], (-1, -1, 5, 6))
    vg = build_visibility_graph(dom)
    assert vg.n_nodes == 6  # the two inner corners of the U are reflex
    # from inside the U out and around the bottom
    d = exact_distance(dom, (2, 3), (2, -0.5))
    via = math.dist((2, 3), (1, 4)) + 1 + 4 + math.dist((0, 0), (2, -0.5))
    assert d == pytest.approx(via)


def test_triangle_inequality_and_symmetry(rng):
    dom = generate_instance(3, 6, 12).domain()
    vg = build_visibility_graph(dom)
    pts = [random_free_point(dom, rng) for _ in range(8)]
    D = np.array([[exact_distance(dom, a, b, vg=vg) for b in pts] for a in pts])
    assert np.allclose(D, D.T, rtol=1e-12, atol=1e-12)
    for i in range(8):
        for j in range(8):
            assert (D[i, j] <= D[i] + D[:, j] + 1e-9).all()


def test_agrees_with_fine_grid():
    dom = PolygonalDomain([square(0, 0), square(1.6, -0.8, 1.2), u_shape(-3, -3, 2, 2, 0.5)], (-4, -4, 4, 4))
    s, t = (-3.5, 1.2), (3.5, 0.3)
    exact = exact_distance(dom, s, t)
    coarse = grid_distance(dom, s, t, 0.25)
    fine = grid_distance(dom, s, t, 0.125)
    # any grid path is a real path; the 8-neighbour metric overshoots by <= 8.3%
    for g, step in ((coarse, 0.25), (fine, 0.125)):
        assert exact - 1e-9 <= g <= 1.083 * exact + 4 * step
