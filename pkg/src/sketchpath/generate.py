"""Seeded random instances."""

from __future__ import annotations

import math

import numpy as np

from .errors import GenerationFailed
from .geometry import convex_hull
from .io import DomainFile

__all__ = ["generate_instance", "random_free_point"]

MAX_TRIES = 2000


def generate_instance(
    seed: int,
    h: int,
    vertices_per_obstacle: int,
    convexity: str = "convex",
    spacing: float = 10.0,
) -> DomainFile:
    """Disjoint random obstacles in a square whose side grows like sqrt(h).

    Convex obstacles are hulls of points on jittered ellipses; simple ones
    are star-shaped polygons with random radii. Obstacles are kept apart by
    their bounding circles, so disjointness holds by construction.
    """
    if h < 0:
        raise ValueError("h must be non-negative")
    if convexity not in ("convex", "simple"):
        raise ValueError("convexity must be 'convex' or 'simple'")
    rng = np.random.default_rng(seed)
    side = spacing * max(1.0, math.sqrt(h)) * 1.5
    m = max(3, int(vertices_per_obstacle))
    circles: list[tuple[float, float, float]] = []
    obstacles = []
    tries = 0
    while len(obstacles) < h:
        tries += 1
        if tries > MAX_TRIES * max(h, 1):
            raise GenerationFailed(f"could not place {h} disjoint obstacles")
        r = float(rng.uniform(0.15, 0.45) * spacing)
        cx, cy = (float(v) for v in rng.uniform(r, side - r, size=2))
        if any(math.hypot(cx - x, cy - y) < r + rr + 0.05 * spacing for x, y, rr in circles):
            continue
        verts = _convex_blob(rng, cx, cy, r, m) if convexity == "convex" else _star_blob(rng, cx, cy, r, m)
        if verts is None:
            continue
        circles.append((cx, cy, r))
        obstacles.append(verts)
    pad = 0.05 * side
    rect = (-pad, -pad, side + pad, side + pad)
    return DomainFile(rect, obstacles)


def _convex_blob(rng, cx, cy, r, m):
    ratio = rng.uniform(0.35, 1.0)
    rot = rng.uniform(0, math.pi)
    ang = np.sort(rng.uniform(0, 2 * math.pi, size=m))
    rad = r * (1 - 0.02 * rng.random(m))
    x = rad * np.cos(ang)
    y = rad * ratio * np.sin(ang)
    xr = cx + x * math.cos(rot) - y * math.sin(rot)
    yr = cy + x * math.sin(rot) + y * math.cos(rot)
    try:
        hull = convex_hull(list(zip(xr.tolist(), yr.tolist())))
    except Exception:
        return None
    return [tuple(v) for v in hull.vertices]


def _star_blob(rng, cx, cy, r, m):
    base = np.linspace(0, 2 * math.pi, m, endpoint=False)
    ang = base + rng.uniform(0, 0.8 * 2 * math.pi / m, size=m)
    # smooth lobes plus small noise, so notches are genuinely non-convex
    lobes = int(rng.integers(2, 6))
    phase = rng.uniform(0, 2 * math.pi)
    rad = r * (0.7 + 0.25 * np.cos(lobes * ang + phase) + 0.05 * rng.random(m))
    x = cx + rad * np.cos(ang)
    y = cy + rad * np.sin(ang)
    return list(zip(x.tolist(), y.tolist()))


def random_free_point(domain, rng, tries: int = 10000):
    """Uniform point of the bounding rectangle outside every obstacle."""
    xmin, ymin, xmax, ymax = domain.bounding_rect
    for _ in range(tries):
        p = (float(rng.uniform(xmin, xmax)), float(rng.uniform(ymin, ymax)))
        if domain.in_free_space(p):
            return p
    raise GenerationFailed("no free point found")
