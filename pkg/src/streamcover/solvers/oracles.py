"""Exact offline unit-ball cover oracles for small point sets."""
from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from ..errors import ContractViolation, InvalidArgument, OracleLimitExceeded
from ..geometry import TOLERANCE

ORACLE_LIMIT = 30


def _as_points(points, dim: int) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, dim) if len(points) else np.empty((0, dim))
    if pts.ndim != 2 or pts.shape[1] != dim:
        raise InvalidArgument(f"expected {dim}-dimensional points")
    return pts


def _unique_points(points, dim: int, limit: int | None) -> np.ndarray:
    pts = _as_points(points, dim)
    if pts.shape[0]:
        pts = np.unique(pts, axis=0)
    if limit is not None and pts.shape[0] > limit:
        raise OracleLimitExceeded(f"{pts.shape[0]} distinct points exceed the oracle limit {limit}")
    return pts


def _row_masks(member: np.ndarray) -> list[int]:
    packed = np.packbits(member, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def min_set_cover(n: int, masks: Iterable[int]) -> int:
    """Minimum number of ``masks`` whose union is ``{0, ..., n-1}``.

    Branch and bound: branch on the uncovered element with fewest covering
    sets, prune with a greedy upper bound and a packing lower bound (uncovered
    elements no single set covers together).
    """
    full = (1 << n) - 1
    if n == 0:
        return 0
    uniq = sorted(set(m & full for m in masks if m & full), key=lambda m: (-m.bit_count(), m))
    maximal: list[int] = []
    for m in uniq:
        if not any(m | k == k for k in maximal):
            maximal.append(m)
    union = 0
    for m in maximal:
        union |= m
    if union != full:
        raise InvalidArgument("candidate sets do not cover every element")

    options = [[m for m in maximal if m >> e & 1] for e in range(n)]
    neighbours = []
    for e in range(n):
        nb = 0
        for m in options[e]:
            nb |= m
        neighbours.append(nb)
    order = sorted(range(n), key=lambda e: (len(options[e]), e))

    def lower_bound(uncovered: int) -> int:
        blocked = 0
        count = 0
        for e in order:
            if uncovered >> e & 1 and not blocked >> e & 1:
                count += 1
                blocked |= neighbours[e]
        return count

    # greedy upper bound
    covered, best = 0, 0
    while covered != full:
        covered |= max(maximal, key=lambda m: (m & ~covered).bit_count())
        best += 1

    seen: dict[int, int] = {}

    def search(covered: int, depth: int) -> None:
        nonlocal best
        if covered == full:
            best = min(best, depth)
            return
        if seen.get(covered, n + 1) <= depth:
            return
        seen[covered] = depth
        uncovered = full & ~covered
        if depth + lower_bound(uncovered) >= best:
            return
        pivot = next(e for e in order if uncovered >> e & 1)
        for m in sorted(options[pivot], key=lambda m: -(m & uncovered).bit_count()):
            search(covered | m, depth + 1)
            if depth + 1 >= best:
                return

    search(0, 0)
    return best


def l2_candidate_centers(pts: np.ndarray, radius: float = 1.0) -> np.ndarray:
    """Each point, plus both centers of the radius circles through every close pair."""
    n = pts.shape[0]
    cands = [pts]
    if n >= 2:
        i, j = np.triu_indices(n, k=1)
        a, b = pts[i], pts[j]
        d = np.linalg.norm(b - a, axis=1)
        ok = (d <= 2 * radius * (1 + TOLERANCE)) & (d > 0)
        a, b, d = a[ok], b[ok], d[ok]
        if d.size:
            mid = (a + b) / 2
            h = np.sqrt(np.maximum(0.0, radius * radius - (d / 2) ** 2))
            perp = np.stack([-(b - a)[:, 1], (b - a)[:, 0]], axis=1) / d[:, None]
            cands += [mid + perp * h[:, None], mid - perp * h[:, None]]
    c = np.concatenate(cands, axis=0)
    return c[np.lexsort((c[:, 1], c[:, 0]))]


def exact_udc_l2(points: Sequence[Sequence[float]], limit: int = ORACLE_LIMIT, radius: float = 1.0) -> int:
    """Minimum number of radius-``radius`` L2 discs covering ``points`` (planar)."""
    pts = _unique_points(points, 2, limit)
    n = pts.shape[0]
    if n == 0:
        return 0
    centers = l2_candidate_centers(pts, radius)
    d2 = ((centers[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
    member = d2 <= (radius * (1 + TOLERANCE)) ** 2
    return min_set_cover(n, _row_masks(member))


def linf_candidate_squares(pts: np.ndarray, radius: float = 1.0) -> np.ndarray:
    """Low corners ``(x_i, y_j)`` of side-``2*radius`` squares."""
    xs, ys = np.unique(pts[:, 0]), np.unique(pts[:, 1])
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    return np.stack([gx.ravel(), gy.ravel()], axis=1)


def exact_udc_linf(points: Sequence[Sequence[float]], limit: int = ORACLE_LIMIT, radius: float = 1.0) -> int:
    """Minimum number of axis-aligned ``2r x 2r`` squares covering ``points`` (planar)."""
    pts = _unique_points(points, 2, limit)
    n = pts.shape[0]
    if n == 0:
        return 0
    corners = linf_candidate_squares(pts, radius)
    centers = corners + radius
    dist = np.abs(centers[:, None, :] - pts[None, :, :]).max(axis=2)
    member = dist <= radius * (1 + TOLERANCE)
    return min_set_cover(n, _row_masks(member))


def greedy_1d(points: Sequence[float], radius: float = 1.0) -> int:
    """Exact minimum number of length-``2r`` intervals covering sorted 1D points."""
    count = 0
    start = -math.inf
    prev = -math.inf
    reach = 2 * radius + radius * TOLERANCE
    for x in points:
        x = float(x)
        if x < prev:
            raise ContractViolation("greedy_1d needs points sorted ascending")
        prev = x
        if x > start + reach:
            start = x
            count += 1
    return count


def greedy_1d_starts(points: Sequence[float], radius: float = 1.0) -> list[float]:
    starts: list[float] = []
    reach = 2 * radius + radius * TOLERANCE
    for x in sorted(float(v) for v in points):
        if not starts or x > starts[-1] + reach:
            starts.append(x)
    return starts


def exact_cover(points, norm, limit: int = ORACLE_LIMIT, radius: float = 1.0) -> int:
    """Dispatch on norm and dimension (1D uses the greedy, which is exact)."""
    from ..geometry import Norm, l1_to_linf_array

    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return 0
    if pts.ndim == 1 or pts.shape[1] == 1:
        return greedy_1d(np.sort(pts.ravel()), radius)
    norm = Norm.parse(norm)
    if norm is Norm.L2:
        return exact_udc_l2(pts, limit, radius)
    if norm is Norm.L1:
        pts = l1_to_linf_array(pts)
    return exact_udc_linf(pts, limit, radius)
