"""Single-pass lattice-cover estimators.

Every point is charged to one ball of a fixed plane-covering lattice and the
number of occupied balls is counted with a distinct sketch.  Occupied balls
always form a valid cover, so the count is at least OPT.

* L2: unit discs centred at ``(s + t, s - t) + offset`` for integers
  ``s, t`` (the grid ``(2i, 2j)`` plus the square centres ``(2i+1, 2j+1)``).
  A unit disc meets ``2*pi`` lattice discs on average over the offset.
* L-infinity: side-2 tiles ``[2i, 2i+2) x [2j, 2j+2)``; an optimal square
  meets at most four of them.
* L1: rotate with ``(x + y, x - y)`` and use the L-infinity tiles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidArgument, UnsupportedDimension
from .geometry import Norm, l1_to_linf_array
from .shifting import as_source
from .sketches import DistinctSketch

LATTICE_BITS = 30
_LATTICE_OFFSET = 1 << (LATTICE_BITS - 1)
DEFAULT_COPIES = 10


@dataclass(frozen=True)
class LatticeSpec:
    norm: Norm = Norm.L2
    shift_offset: tuple[float, float] = (0.0, 0.0)
    copies: int = DEFAULT_COPIES

    def __post_init__(self):
        object.__setattr__(self, "norm", Norm.parse(self.norm))
        off = tuple(float(v) for v in self.shift_offset)
        if len(off) != 2:
            raise UnsupportedDimension("lattice covers are planar")
        if self.norm is not Norm.L2 and off != (0.0, 0.0):
            raise InvalidArgument("only the L2 lattice takes an offset")
        if not all(0.0 <= v < 2.0 for v in off):
            raise InvalidArgument("offset coordinates must lie in [0, 2)")
        if self.copies < 1:
            raise InvalidArgument("copies must be >= 1")
        object.__setattr__(self, "shift_offset", off)

    def with_offset(self, offset: Sequence[float]) -> "LatticeSpec":
        return LatticeSpec(self.norm, tuple(offset), self.copies)


def _pack(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    lim = _LATTICE_OFFSET
    if a.size and (np.abs(a).max() >= lim or np.abs(b).max() >= lim):
        raise InvalidArgument("point too far from the origin for the lattice key")
    a = (a + lim).astype(np.uint64)
    b = (b + lim).astype(np.uint64)
    return a | (b << np.uint64(LATTICE_BITS))


def _l2_nearest(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Lattice coordinates ``(s, t)`` of the nearest centre, ties to the lexicographically least centre."""
    s = (u[:, 0] + u[:, 1]) / 2
    t = (u[:, 0] - u[:, 1]) / 2
    fs, ft = np.floor(s), np.floor(t)
    best_s, best_t = fs.copy(), ft.copy()
    best_d = np.full(s.shape, np.inf)
    best_cx = np.full(s.shape, np.inf)
    best_cy = np.full(s.shape, np.inf)
    for ds in (0.0, 1.0):
        for dt in (0.0, 1.0):
            cs, ct = fs + ds, ft + dt
            d = (s - cs) ** 2 + (t - ct) ** 2
            cx, cy = cs + ct, cs - ct
            better = (d < best_d) | ((d == best_d) & ((cx < best_cx) | ((cx == best_cx) & (cy < best_cy))))
            best_s = np.where(better, cs, best_s)
            best_t = np.where(better, ct, best_t)
            best_d = np.where(better, d, best_d)
            best_cx = np.where(better, cx, best_cx)
            best_cy = np.where(better, cy, best_cy)
    return best_s.astype(np.int64), best_t.astype(np.int64)


def _as_planar(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if pts.shape[1] != 2:
        raise UnsupportedDimension("lattice covers are planar")
    return pts


def lattice_centers(spec: LatticeSpec, points) -> np.ndarray:
    """Centre of the ball each point is charged to."""
    pts = _as_planar(points)
    if spec.norm is Norm.L2:
        s, t = _l2_nearest(pts - np.asarray(spec.shift_offset))
        return np.stack([s + t, s - t], axis=1).astype(float) + np.asarray(spec.shift_offset)
    if spec.norm is Norm.L1:
        pts = l1_to_linf_array(pts)
    return np.floor(pts / 2) * 2 + 1


def lattice_assign_many(spec: LatticeSpec, points) -> np.ndarray:
    pts = _as_planar(points)
    if spec.norm is Norm.L2:
        s, t = _l2_nearest(pts - np.asarray(spec.shift_offset))
        return _pack(s, t)
    if spec.norm is Norm.L1:
        pts = l1_to_linf_array(pts)
    tiles = np.floor(pts / 2).astype(np.int64)
    return _pack(tiles[:, 0], tiles[:, 1])


def lattice_assign(spec: LatticeSpec, p: Sequence[float]) -> int:
    """Integer id of the lattice ball ``p`` is charged to."""
    return int(lattice_assign_many(spec, [p])[0])


def lattice_tile(spec: LatticeSpec, p: Sequence[float]) -> tuple[int, int]:
    """Readable form of :func:`lattice_assign`: tile index (L-inf/L1) or lattice coordinates (L2)."""
    key = lattice_assign(spec, p)
    mask = (1 << LATTICE_BITS) - 1
    return (key & mask) - _LATTICE_OFFSET, (key >> LATTICE_BITS) - _LATTICE_OFFSET


def centers_within(offset: Sequence[float], q: Sequence[float], radius: float = 2.0) -> int:
    """Number of L2 lattice centres (with ``offset``) within ``radius`` of ``q``."""
    ux, uy = q[0] - offset[0], q[1] - offset[1]
    s0, t0 = (ux + uy) / 2, (ux - uy) / 2
    span = math.ceil(radius) + 1
    count = 0
    for s in range(math.floor(s0) - span, math.floor(s0) + span + 2):
        for t in range(math.floor(t0) - span, math.floor(t0) + span + 2):
            if (s + t - ux) ** 2 + (s - t - uy) ** 2 <= radius * radius:
                count += 1
    return count


def centers_within_many(offsets, q: Sequence[float], radius: float = 2.0) -> np.ndarray:
    """Vectorised :func:`centers_within` over an ``(m, 2)`` array of offsets."""
    offs = np.asarray(offsets, dtype=float).reshape(-1, 2)
    u = np.asarray(q, dtype=float)[None, :] - offs
    s0 = np.floor((u[:, 0] + u[:, 1]) / 2)
    t0 = np.floor((u[:, 0] - u[:, 1]) / 2)
    span = math.ceil(radius) + 1
    counts = np.zeros(offs.shape[0], dtype=np.int64)
    for ds in range(-span, span + 2):
        for dt in range(-span, span + 2):
            s, t = s0 + ds, t0 + dt
            counts += ((s + t - u[:, 0]) ** 2 + (s - t - u[:, 1]) ** 2 <= radius * radius)
    return counts


@dataclass
class LatticeEstimate:
    value: float
    copy_values: list[float]
    offsets: list[tuple[float, float]]
    space_bits: int
    points_processed: int
    diagnostics: dict = field(default_factory=dict)

    def __float__(self) -> float:
        return float(self.value)


def _chunks(source, chunk: int):
    return as_source(source, 2).chunks(chunk)


def lattice_estimate(source, spec: LatticeSpec, epsilon: float, seed: int = 0,
                     sketch_factory=None, chunk: int = 8192) -> LatticeEstimate:
    """Minimum over ``spec.copies`` copies of the sketched occupied-ball count (one pass)."""
    if not 0 < epsilon < 1:
        raise InvalidArgument("epsilon must lie in (0, 1)")
    seqs = np.random.SeedSequence(seed).spawn(spec.copies)
    copies = []
    for sq in seqs:
        off_seq, sk_seq = sq.spawn(2)
        if spec.norm is Norm.L2:
            offset = tuple(np.random.default_rng(off_seq).uniform(0.0, 2.0, size=2))
            cspec = spec.with_offset(offset)
        else:
            cspec = spec
        sk = sketch_factory() if sketch_factory else DistinctSketch(
            epsilon, seed=int(sk_seq.generate_state(1, np.uint64)[0]), universe=1 << (2 * LATTICE_BITS))
        copies.append((cspec, sk))
    n = 0
    for c in _chunks(source, chunk):
        if c.shape[0] == 0:
            continue
        n += c.shape[0]
        for cspec, sk in copies:
            sk.insert_many(lattice_assign_many(cspec, c))
    values = [float(sk.estimate()) for _, sk in copies]
    return LatticeEstimate(
        value=min(values),
        copy_values=values,
        offsets=[cs.shift_offset for cs, _ in copies],
        space_bits=sum(sk.space_bits() for _, sk in copies) + max(1, n.bit_length()),
        points_processed=n,
        diagnostics={"norm": spec.norm.value, "copies": spec.copies},
    )


def occupied_balls(spec: LatticeSpec, points) -> int:
    """Exact occupied-ball count for one lattice (the sketch-free reference)."""
    pts = _as_planar(points) if len(points) else np.empty((0, 2))
    return int(np.unique(lattice_assign_many(spec, pts)).size) if pts.shape[0] else 0
