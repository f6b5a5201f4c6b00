import math

import numpy as np
import pytest

from sketchpath.geometry import ConvexPolygon, PolygonalDomain, SimplePolygon


def regular(n, cx=0.0, cy=0.0, r=1.0, phase=0.0):
    return ConvexPolygon(
        [(cx + r * math.cos(phase + 2 * math.pi * i / n), cy + r * math.sin(phase + 2 * math.pi * i / n)) for i in range(n)]
    )


def square(x0, y0, side=1.0):
    return ConvexPolygon([(x0, y0), (x0 + side, y0), (x0 + side, y0 + side), (x0, y0 + side)])


def u_shape(x0=0.0, y0=0.0, w=4.0, h=4.0, t=1.0):
    """A U opening upwards."""
    return SimplePolygon(
        [(x0, y0), (x0 + w, y0), (x0 + w, y0 + h), (x0 + w - t, y0 + h), (x0 + w - t, y0 + t),
         (x0 + t, y0 + t), (x0 + t, y0 + h), (x0, y0 + h)]
    )


def grid_distance(domain: PolygonalDomain, s, t, step: float) -> float:
    """8-connected grid path through s and t; every grid edge must be visible."""
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import dijkstra

    from sketchpath.geometry import segment_visible

    xmin, ymin, xmax, ymax = domain.bounding_rect
    xs = np.arange(xmin, xmax + 1e-12, step)
    ys = np.arange(ymin, ymax + 1e-12, step)
    pts = [(float(x), float(y)) for x in xs for y in ys]
    free = [domain.in_free_space(p) for p in pts]
    nx_, ny_ = len(xs), len(ys)
    idx = lambda i, j: i * ny_ + j  # noqa: E731
    rows, cols, w = [], [], []
    for i in range(nx_):
        for j in range(ny_):
            if not free[idx(i, j)]:
                continue
            for di, dj in ((1, 0), (0, 1), (1, 1), (1, -1)):
                a, b = i + di, j + dj
                if 0 <= a < nx_ and 0 <= b < ny_ and free[idx(a, b)]:
                    p, q = pts[idx(i, j)], pts[idx(a, b)]
                    if segment_visible((p, q), domain):
                        rows.append(idx(i, j))
                        cols.append(idx(a, b))
                        w.append(math.dist(p, q))
    n = len(pts)
    extra = []
    for p in (s, t):
        k = len(pts) + len(extra)
        extra.append(p)
        for m, q in enumerate(pts):
            if free[m] and math.dist(p, q) <= 1.5 * step and segment_visible((p, q), domain):
                rows.append(k)
                cols.append(m)
                w.append(max(math.dist(p, q), 1e-300))
    n += 2
    mat = coo_matrix((w, (rows, cols)), shape=(n, n)).tocsr()
    d = dijkstra(mat, directed=False, indices=n - 2)
    return float(d[n - 1])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
