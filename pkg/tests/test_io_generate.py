import json

import numpy as np
import pytest

from sketchpath.errors import DomainError, OverlappingObstacles, ParseError, SelfIntersecting
from sketchpath.generate import generate_instance, random_free_point
from sketchpath.geometry import ConvexPolygon, SimplePolygon
from sketchpath.io import dump_domain, parse_domain, parse_domain_file, validate_domain


def _doc(obstacles, rect=(-10, -10, 10, 10), **kw):
    return json.dumps({"version": 1, "bounding_rect": list(rect), "obstacles": obstacles, **kw})


def test_parse_square_and_points():
    df = parse_domain_file(_doc([[[0, 0], [1, 0], [1, 1], [0, 1]]], points={"s": [-2, 0], "t": [3, 0.5]}))
    dom = df.domain()
    assert dom.h == 1 and dom.n == 4
    assert isinstance(dom.obstacles[0], ConvexPolygon)
    assert df.points == {"s": (-2.0, 0.0), "t": (3.0, 0.5)}


def test_clockwise_input_is_reversed():
    dom = parse_domain(_doc([[[0, 0], [0, 1], [1, 1], [1, 0]]]))
    v = np.asarray(dom.obstacles[0].vertices)
    area2 = np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1])
    assert area2 == pytest.approx(2.0)


def test_overlap_reported_with_indices():
    with pytest.raises(OverlappingObstacles) as exc:
        parse_domain(_doc([[[0, 0], [2, 0], [2, 2], [0, 2]], [[1, 1], [3, 1], [3, 3], [1, 3]]]))
    assert exc.value.pair == (0, 1)


def test_nested_and_touching_obstacles_rejected():
    with pytest.raises(OverlappingObstacles):
        parse_domain(_doc([[[0, 0], [4, 0], [4, 4], [0, 4]], [[1, 1], [2, 1], [2, 2], [1, 2]]]))
    with pytest.raises(OverlappingObstacles):
        parse_domain(_doc([[[0, 0], [1, 0], [1, 1], [0, 1]], [[1, 0], [2, 0], [2, 1], [1, 1]]]))


@pytest.mark.parametrize(
    "text,err",
    [
        ("not json", ParseError),
        ('{"version": 2, "obstacles": []}', ParseError),
        (_doc([[[0, 0], [1, 0]]]), DomainError),
        (_doc([[[0, 0], [4, 0], [4, 4], [2, -1], [0, 4]]]), SelfIntersecting),
        (_doc([[[0, 0], [1, 0], [1, 1]]], rect=(0, 0, 5, 5)), DomainError),
    ],
)
def test_bad_input(text, err):
    with pytest.raises(err):
        parse_domain(text)


def test_round_trip_is_exact():
    df = generate_instance(11, 7, 15, "simple")
    df.points = {"s": (0.1 + 0.2, 1 / 3)}
    again = parse_domain_file(df.to_json())
    assert again.obstacles == df.obstacles
    assert again.points == df.points
    assert again.bounding_rect == df.bounding_rect
    dom = df.domain()
    assert dump_domain(parse_domain(dump_domain(dom))) == dump_domain(dom)


def test_generation_is_deterministic():
    assert generate_instance(5, 8, 20).to_json() == generate_instance(5, 8, 20).to_json()
    assert generate_instance(5, 8, 20).to_json() != generate_instance(6, 8, 20).to_json()


def test_empty_instance():
    dom = generate_instance(0, 0, 10).domain()
    assert dom.h == 0 and dom.n == 0


@pytest.mark.parametrize("convexity", ["convex", "simple"])
def test_generated_domains_are_valid(convexity):
    for seed in range(10):
        df = generate_instance(seed, 12, 25, convexity)
        dom = df.domain()
        validate_domain(dom)
        assert dom.h == 12
        assert all(3 <= o.n <= 25 for o in dom.obstacles)
        kinds = {type(o) for o in dom.obstacles}
        if convexity == "convex":
            assert kinds == {ConvexPolygon}
        else:
            assert SimplePolygon in kinds
        p = random_free_point(dom, np.random.default_rng(seed))
        assert dom.in_free_space(p)
