"""Independent brute-force references used by the tests.

Nothing here calls into ``streamcover``: covers are found by enumerating
every subset of the points, deciding whether one ball can hold that subset
(minimum enclosing circle / bounding box / extent), then running an exact DP
over subset masks.
"""
from __future__ import annotations

import itertools
import math

TOL = 1e-9


def _circle_two(a, b):
    cx, cy = (a[0] + b[0]) / 2, (a[1] + b[1]) / 2
    return cx, cy, math.dist(a, b) / 2


def _circle_three(a, b, c):
    ax, ay = a
    bx, by = b
    cx, cy = c
    d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if abs(d) < 1e-15:
        return None
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d
    return ux, uy, math.dist((ux, uy), a)


def min_enclosing_radius(pts) -> float:
    """Smallest enclosing circle radius by trying every 2- and 3-point circle."""
    pts = list(pts)
    if len(pts) <= 1:
        return 0.0
    best = math.inf
    cands = [_circle_two(a, b) for a, b in itertools.combinations(pts, 2)]
    cands += [c for c in (_circle_three(*t) for t in itertools.combinations(pts, 3)) if c is not None]
    for cx, cy, r in cands:
        if r >= best:
            continue
        if all(math.dist((cx, cy), p) <= r * (1 + 1e-12) + 1e-12 for p in pts):
            best = r
    return best


def _fits_l2(pts, radius=1.0) -> bool:
    return min_enclosing_radius(pts) <= radius * (1 + TOL)


def _fits_linf(pts, radius=1.0) -> bool:
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    return max(xs) - min(xs) <= 2 * radius * (1 + TOL) and max(ys) - min(ys) <= 2 * radius * (1 + TOL)


def _subset_cover(pts, fits) -> int:
    pts = sorted(set(tuple(map(float, p)) for p in pts))
    n = len(pts)
    if n == 0:
        return 0
    full = (1 << n) - 1
    ok = [False] * (1 << n)
    for mask in range(1, 1 << n):
        ok[mask] = fits([pts[i] for i in range(n) if mask >> i & 1])
    best = [math.inf] * (1 << n)
    best[0] = 0
    for mask in range(1, 1 << n):
        low = mask & -mask  # the lowest point must be in some ball
        sub = mask
        b = math.inf
        while sub:
            if sub & low and ok[sub]:
                b = min(b, best[mask ^ sub] + 1)
            sub = (sub - 1) & mask
        best[mask] = b
    return int(best[full])


def brute_cover_l2(pts, radius=1.0) -> int:
    return _subset_cover(pts, lambda s: _fits_l2(s, radius))


def brute_cover_linf(pts, radius=1.0) -> int:
    return _subset_cover(pts, lambda s: _fits_linf(s, radius))


def brute_cover_1d(xs, radius=1.0) -> int:
    """Fewest length-2r intervals anchored at points (an optimum can always be slid to a point)."""
    xs = sorted(set(float(x) for x in xs))
    if not xs:
        return 0
    reach = 2 * radius * (1 + TOL)
    for k in range(1, len(xs) + 1):
        for starts in itertools.combinations(xs, k):
            if all(any(s <= x <= s + reach for s in starts) for x in xs):
                return k
    raise AssertionError("unreachable")


def brute_strip_sum(pts, anchor_y: float, ell: int) -> int:
    """Sum over the ell height-2 strips of the exact 1D cover of x-coordinates."""
    strips: dict[int, list[float]] = {}
    for x, y in pts:
        s = min(ell - 1, int(math.floor((y - anchor_y) / 2)))
        strips.setdefault(s, []).append(x)
    return sum(brute_cover_1d(v) for v in strips.values())
