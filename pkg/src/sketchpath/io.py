"""JSON domain files."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, OverlappingObstacles, ParseError, SelfIntersecting
from .geometry import ConvexPolygon, Point, PolygonalDomain, SimplePolygon, _segments_intersect_mask
from .errors import DegenerateInput, GeometryError

__all__ = ["FORMAT_VERSION", "DomainFile", "parse_domain", "parse_domain_file", "dump_domain", "validate_domain"]

log = logging.getLogger(__name__)

FORMAT_VERSION = 1


@dataclass
class DomainFile:
    bounding_rect: tuple[float, float, float, float]
    obstacles: list[list[tuple[float, float]]]
    points: dict[str, tuple[float, float]] = field(default_factory=dict)
    version: int = FORMAT_VERSION

    def to_json(self) -> str:
        # repr of a float round-trips exactly, and json uses repr
        doc = {
            "version": self.version,
            "bounding_rect": list(self.bounding_rect),
            "obstacles": [[list(p) for p in obs] for obs in self.obstacles],
        }
        if self.points:
            doc["points"] = {k: list(v) for k, v in self.points.items()}
        return json.dumps(doc, indent=None, separators=(",", ":")) + "\n"

    def domain(self, validate: bool = True) -> PolygonalDomain:
        return build_domain(self.obstacles, self.bounding_rect, validate=validate)


def parse_domain_file(text: str) -> DomainFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    version = doc.get("version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported version {version!r}")
    try:
        obstacles = [[(float(x), float(y)) for x, y in obs] for obs in doc.get("obstacles", [])]
    except (TypeError, ValueError) as exc:
        raise ParseError(f"obstacles must be lists of [x, y] pairs: {exc}") from exc
    rect = doc.get("bounding_rect")
    if rect is None:
        rect = _auto_rect(obstacles)
    try:
        rect = tuple(float(v) for v in rect)
    except (TypeError, ValueError) as exc:
        raise ParseError("bounding_rect must be [xmin, ymin, xmax, ymax]") from exc
    if len(rect) != 4:
        raise ParseError("bounding_rect must be [xmin, ymin, xmax, ymax]")
    points = {}
    for name, p in (doc.get("points") or {}).items():
        try:
            points[str(name)] = (float(p[0]), float(p[1]))
        except (TypeError, ValueError, IndexError) as exc:
            raise ParseError(f"point {name!r} must be [x, y]") from exc
    return DomainFile(rect, obstacles, points, version)


def parse_domain(text: str) -> PolygonalDomain:
    return parse_domain_file(text).domain()


def dump_domain(domain: PolygonalDomain, points: dict | None = None) -> str:
    obs = [[tuple(map(float, v)) for v in o.vertices] for o in domain.obstacles]
    return DomainFile(domain.bounding_rect, obs, dict(points or {})).to_json()


def _auto_rect(obstacles):
    if not obstacles:
        return (-1.0, -1.0, 1.0, 1.0)
    allp = np.array([p for o in obstacles for p in o])
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    pad = 0.1 * max(float((hi - lo).max()), 1.0)
    return (lo[0] - pad, lo[1] - pad, hi[0] + pad, hi[1] + pad)


def build_domain(obstacles, rect, validate: bool = True) -> PolygonalDomain:
    polys = []
    for i, verts in enumerate(obstacles):
        try:
            poly = SimplePolygon(verts)
        except (DegenerateInput, GeometryError) as exc:
            raise DomainError(str(exc), obstacle=i) from exc
        if poly.was_clockwise:
            log.warning("obstacle %d given clockwise; reversed", i)
        if validate and not poly.is_simple():
            raise SelfIntersecting(i)
        if poly.is_convex():
            poly = ConvexPolygon(poly.vertices)
        polys.append(poly)
    domain = PolygonalDomain(polys, rect)
    if validate:
        validate_domain(domain)
    return domain


def validate_domain(domain: PolygonalDomain) -> None:
    """Raise if obstacles overlap or leave the bounding rectangle."""
    xmin, ymin, xmax, ymax = domain.bounding_rect
    obs = domain.obstacles
    for i, o in enumerate(obs):
        x0, y0, x1, y1 = o.bbox
        if not (xmin < x0 and ymin < y0 and x1 < xmax and y1 < ymax):
            raise DomainError("not strictly inside the bounding rectangle", obstacle=i)
    for i in range(len(obs)):
        x0, y0, x1, y1 = obs[i].bbox
        for j in domain.candidates(x0, y0, x1, y1):
            if j <= i:
                continue
            if _polygons_meet(obs[i], obs[j]):
                raise OverlappingObstacles(i, int(j))


def _polygons_meet(a: SimplePolygon, b: SimplePolygon) -> bool:
    ea, eb = a.edges(), b.edges()
    for row in ea:
        if _segments_intersect_mask(row[0], row[1], row[2], row[3], eb).any():
            return True
    return a.locate(b.vertices[0]) >= 0 or b.locate(a.vertices[0]) >= 0
