"""Orientation predicate with a floating-point filter and an exact fallback.

The filter uses Shewchuk's first-stage error bound; when the float determinant
is too close to zero to trust, the sign is recomputed with rationals.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

_EPSILON = np.finfo(float).eps / 2.0
_CCW_ERRBOUND = (3.0 + 16.0 * _EPSILON) * _EPSILON


def _orient_exact(ax, ay, bx, by, cx, cy) -> int:
    ax, ay, bx, by, cx, cy = map(Fraction, (ax, ay, bx, by, cx, cy))
    det = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx)
    return (det > 0) - (det < 0)


def orient2d(a, b, c) -> int:
    """Sign of the signed area of triangle ``abc``: +1 CCW, -1 CW, 0 collinear."""
    if (a[0] == c[0] or b[1] == c[1]) and (a[1] == c[1] or b[0] == c[0]):
        return 0
    detleft = (a[0] - c[0]) * (b[1] - c[1])
    detright = (a[1] - c[1]) * (b[0] - c[0])
    det = detleft - detright
    bound = _CCW_ERRBOUND * (abs(detleft) + abs(detright))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    return _orient_exact(a[0], a[1], b[0], b[1], c[0], c[1])


def orient2d_many(ax, ay, bx, by, cx, cy) -> np.ndarray:
    """Vectorised :func:`orient2d` over broadcastable coordinate arrays."""
    ax, ay, bx, by, cx, cy = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (ax, ay, bx, by, cx, cy))
    )
    detleft = (ax - cx) * (by - cy)
    detright = (ay - cy) * (bx - cx)
    det = detleft - detright
    bound = _CCW_ERRBOUND * (np.abs(detleft) + np.abs(detright))
    out = np.where(det > bound, 1, np.where(-det > bound, -1, 0)).astype(np.int8)
    # a zero coordinate difference in both products makes the determinant exactly 0
    exact_zero = ((ax == cx) | (by == cy)) & ((ay == cy) | (bx == cx))
    unsure = np.flatnonzero(((np.abs(det) <= bound) & ~exact_zero).ravel())
    if unsure.size:
        flat = out.reshape(-1)
        cols = [v.reshape(-1) for v in (ax, ay, bx, by, cx, cy)]
        for i in unsure:
            flat[i] = _orient_exact(*(float(col[i]) for col in cols))
    return out
