"""Coordinate substrate: points, norms, balls, shifted window partitions.

Windows have side ``2*ell`` and even-integer anchors; a window is closed on
the low edge of every axis and open on the high edge.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import InvalidArgument, UnsupportedDimension

#: relative slack on every norm comparison
TOLERANCE = 1e-9
#: default absolute coordinate bound
COORD_BOUND = 1e9

#: bits per packed window-index coordinate
INDEX_BITS = 20
_INDEX_OFFSET = 1 << (INDEX_BITS - 1)
_INDEX_MASK = (1 << INDEX_BITS) - 1

Point = tuple  # tuple[float, ...]


class Norm(enum.Enum):
    L1 = "l1"
    L2 = "l2"
    LINF = "linf"

    @classmethod
    def parse(cls, value: "str | Norm") -> "Norm":
        if isinstance(value, Norm):
            return value
        try:
            return cls(value.lower())
        except ValueError:
            raise InvalidArgument(f"unknown norm {value!r}") from None

    def rotated(self) -> "Norm":
        """Norm seen after :func:`l1_to_linf`."""
        return Norm.LINF if self in (Norm.L1, Norm.LINF) else self


def make_point(coords: Sequence[float], bound: float = COORD_BOUND) -> Point:
    pt = tuple(float(c) for c in coords)
    if not pt:
        raise InvalidArgument("a point needs at least one coordinate")
    for c in pt:
        if not math.isfinite(c):
            raise InvalidArgument(f"non-finite coordinate in {pt}")
        if abs(c) > bound:
            raise InvalidArgument(f"coordinate {c} exceeds bound {bound}")
    return pt


def norm_distance(a: Sequence[float], b: Sequence[float], norm: Norm) -> float:
    if len(a) != len(b):
        raise InvalidArgument(f"dimension mismatch: {len(a)} vs {len(b)}")
    diffs = [abs(x - y) for x, y in zip(a, b)]
    if norm is Norm.L1:
        return sum(diffs)
    if norm is Norm.LINF:
        return max(diffs)
    return math.sqrt(sum(d * d for d in diffs))


@dataclass(frozen=True)
class Ball:
    center: Point
    radius: float = 1.0
    norm: Norm = Norm.L2

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidArgument("ball radius must be positive")


def ball_contains(ball: Ball, p: Sequence[float]) -> bool:
    """Closed-ball membership with relative slack ``TOLERANCE``."""
    if len(p) != len(ball.center):
        raise InvalidArgument(f"dimension mismatch: {len(p)} vs {len(ball.center)}")
    return norm_distance(p, ball.center, ball.norm) <= ball.radius * (1.0 + TOLERANCE)


def l1_to_linf(p: Sequence[float]) -> Point:
    """Rotate a planar point so L1 balls become L-infinity balls."""
    if len(p) != 2:
        raise UnsupportedDimension(f"l1_to_linf needs d == 2, got d == {len(p)}")
    x, y = p
    return (x + y, x - y)


def l1_to_linf_array(pts: np.ndarray) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise UnsupportedDimension("l1_to_linf needs planar points")
    return np.stack([pts[:, 0] + pts[:, 1], pts[:, 0] - pts[:, 1]], axis=1)


@dataclass(frozen=True)
class Shift:
    offsets: tuple[int, ...]
    ell: int

    def __post_init__(self):
        if self.ell < 1:
            raise InvalidArgument("ell must be >= 1")
        if not self.offsets:
            raise InvalidArgument("a shift needs at least one offset")
        for o in self.offsets:
            if not 0 <= o < self.ell:
                raise InvalidArgument(f"offset {o} outside [0, {self.ell})")

    @property
    def dim(self) -> int:
        return len(self.offsets)

    @property
    def side(self) -> int:
        return 2 * self.ell

    def anchor(self, index: Sequence[int]) -> tuple[int, ...]:
        """Low corner of the window with the given grid index (even integers)."""
        return tuple(2 * self.ell * i + 2 * o for i, o in zip(index, self.offsets))

    def ordinal(self) -> int:
        """Position of this shift in :func:`enumerate_shifts` order."""
        out = 0
        for o in self.offsets:
            out = out * self.ell + o
        return out


def enumerate_shifts(ell: int, dim: int) -> Iterator[Shift]:
    """All ``ell**dim`` shifts for a given ``(ell, dim)``."""
    for offsets in itertools.product(range(ell), repeat=dim):
        yield Shift(tuple(offsets), ell)


def random_shift(ell: int, dim: int, rng: np.random.Generator) -> Shift:
    return Shift(tuple(int(v) for v in rng.integers(0, ell, size=dim)), ell)


@dataclass(frozen=True)
class WindowId:
    index: tuple[int, ...]
    shift: Shift

    def encode(self) -> int:
        return encode_index(self.index)

    @property
    def anchor(self) -> tuple[int, ...]:
        return self.shift.anchor(self.index)


def window_id(p: Sequence[float], s: Shift) -> WindowId:
    if len(p) != s.dim:
        raise InvalidArgument(f"point has dimension {len(p)}, shift has {s.dim}")
    side = s.side
    index = []
    for c, o in zip(p, s.offsets):
        i = math.floor((c - 2 * o) / side)
        # the quotient can round across an integer; settle against the exact anchors
        if c < side * i + 2 * o:
            i -= 1
        elif c >= side * (i + 1) + 2 * o:
            i += 1
        index.append(i)
    return WindowId(tuple(index), s)


def window_indices(points: np.ndarray, s: Shift) -> np.ndarray:
    """Vectorised :func:`window_id`: integer index array of shape ``(n, d)``."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != s.dim:
        raise InvalidArgument(f"expected points of shape (n, {s.dim}), got {pts.shape}")
    off = 2.0 * np.asarray(s.offsets, dtype=float)
    idx = np.floor((pts - off) / s.side)
    idx -= pts < idx * s.side + off
    idx += pts >= (idx + 1) * s.side + off
    return idx.astype(np.int64)


def encode_index(index: Sequence[int]) -> int:
    """Pack a window index into one non-negative integer key (20 bits per axis)."""
    key = 0
    for axis, i in enumerate(index):
        v = i + _INDEX_OFFSET
        if not 0 <= v <= _INDEX_MASK:
            raise InvalidArgument(f"window index {i} on axis {axis} outside the 20-bit key range")
        key |= v << (INDEX_BITS * axis)
    return key


def encode_indices(indices: np.ndarray) -> np.ndarray:
    idx = np.asarray(indices, dtype=np.int64)
    v = idx + _INDEX_OFFSET
    if v.size and (v.min() < 0 or v.max() > _INDEX_MASK):
        raise InvalidArgument("window index outside the 20-bit key range")
    keys = np.zeros(idx.shape[0], dtype=np.uint64)
    for axis in range(idx.shape[1]):
        keys |= v[:, axis].astype(np.uint64) << np.uint64(INDEX_BITS * axis)
    return keys


def decode_key(key: int, dim: int) -> tuple[int, ...]:
    return tuple(((int(key) >> (INDEX_BITS * a)) & _INDEX_MASK) - _INDEX_OFFSET for a in range(dim))


def key_universe(dim: int) -> int:
    """Number of distinct window keys for dimension ``dim``."""
    return 1 << (INDEX_BITS * dim)
