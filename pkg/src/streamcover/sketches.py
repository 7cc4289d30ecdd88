"""Distinct-elements estimation over integer keys (t smallest hash values, median of repetitions)."""
from __future__ import annotations

import math
import struct

import numpy as np

from ._fastmod import MERSENNE61
from .errors import IncompatibleSketch, InvalidArgument, InvalidKey
from .hashing import HashBank, HashFamilyParams

DEFAULT_REPETITIONS = 9
DEFAULT_CK = 48.0
DEFAULT_DEGREE = 2

_MAGIC = b"SCDS"
_VERSION = 1
_HEADER = struct.Struct("<4sHHIHHddQQQ")


def threshold(epsilon: float, c_k: float = DEFAULT_CK) -> int:
    return math.ceil(c_k / (epsilon * epsilon))


class DistinctSketch:
    """(1 +- eps) estimate of the number of distinct keys inserted.

    Each repetition keeps the ``t = ceil(c_k / eps**2)`` smallest distinct hash
    values.  With fewer than ``t`` values stored the count is exact; otherwise
    a repetition reports ``(t - 1) * p / v_t``.  The estimate is the median
    over repetitions.
    """

    def __init__(self, epsilon: float, seed: int = 0, repetitions: int = DEFAULT_REPETITIONS,
                 c_k: float = DEFAULT_CK, degree: int = DEFAULT_DEGREE, universe: int = MERSENNE61):
        if not 0 < epsilon < 1:
            raise InvalidArgument("epsilon must lie in (0, 1)")
        if repetitions < 1 or repetitions % 2 == 0:
            raise InvalidArgument("repetitions must be a positive odd integer")
        if not 0 <= seed < (1 << 64):
            raise InvalidArgument("seed must fit in 64 bits")
        self.epsilon = float(epsilon)
        self.seed = int(seed)
        self.repetitions = repetitions
        self.c_k = float(c_k)
        self.t = threshold(epsilon, c_k)
        self.params = HashFamilyParams(degree, universe)
        self.bank = HashBank(repetitions, self.params, self.seed, cache=True)
        self.values = [np.empty(0, dtype=np.uint64) for _ in range(repetitions)]

    @property
    def universe(self) -> int:
        return self.params.universe

    def insert(self, key: int) -> None:
        key = int(key)
        if not 0 <= key < self.universe:
            raise InvalidKey(f"key {key} outside [0, {self.universe})")
        self.insert_many(np.array([key], dtype=np.uint64))

    def insert_many(self, keys) -> None:
        keys = np.unique(np.asarray(keys, dtype=np.uint64))
        if keys.size == 0:
            return
        hashed = self.bank.evaluate(keys)
        for i in range(self.repetitions):
            cur = self.values[i]
            new = hashed[i]
            if cur.shape[0] >= self.t:
                new = new[new < cur[-1]]
                if new.size == 0:
                    continue
            self.values[i] = np.union1d(cur, new)[: self.t]

    def estimate(self) -> float:
        per_rep = []
        for vals in self.values:
            if vals.shape[0] < self.t:
                per_rep.append(float(vals.shape[0]))
            else:
                per_rep.append((self.t - 1) * MERSENNE61 / float(vals[self.t - 1]))
        return float(np.median(per_rep))

    def compatible(self, other: "DistinctSketch") -> bool:
        return (self.epsilon == other.epsilon and self.repetitions == other.repetitions
                and self.t == other.t and self.params == other.params and self.seed == other.seed)

    def merge(self, other: "DistinctSketch") -> "DistinctSketch":
        if not self.compatible(other):
            raise IncompatibleSketch("sketches differ in parameters or hash functions")
        out = self.copy()
        out.values = [np.union1d(a, b)[: self.t] for a, b in zip(self.values, other.values)]
        return out

    def copy(self) -> "DistinctSketch":
        out = object.__new__(DistinctSketch)
        out.__dict__.update(self.__dict__)
        out.values = [v.copy() for v in self.values]
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, DistinctSketch):
            return NotImplemented
        return self.compatible(other) and all(np.array_equal(a, b) for a, b in zip(self.values, other.values))

    def space_bits(self) -> int:
        return self.repetitions * self.t * self.params.value_bits + self.bank.space_bits()

    def to_bytes(self) -> bytes:
        head = _HEADER.pack(_MAGIC, _VERSION, self.repetitions, self.t, self.params.degree, 0,
                            self.epsilon, self.c_k, self.seed, self.params.universe, self.params.prime)
        parts = [head]
        for i in range(self.repetitions):
            parts.append(self.bank.block_coefficients(0)[i].astype("<u8").tobytes())
        for vals in self.values:
            parts.append(struct.pack("<I", vals.shape[0]))
            parts.append(vals.astype("<u8").tobytes())
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "DistinctSketch":
        if len(blob) < _HEADER.size:
            raise InvalidArgument("truncated sketch blob")
        magic, version, m, t, degree, _, eps, c_k, seed, universe, prime = _HEADER.unpack_from(blob, 0)
        if magic != _MAGIC or version != _VERSION:
            raise InvalidArgument("not a version-1 distinct sketch blob")
        if prime != MERSENNE61:
            raise InvalidArgument("unsupported field prime in blob")
        sk = cls(eps, seed=seed, repetitions=m, c_k=c_k, degree=degree, universe=universe)
        if sk.t != t:
            raise InvalidArgument("threshold in blob disagrees with its epsilon")
        off = _HEADER.size
        coeff_bytes = m * degree * 8
        stored = np.frombuffer(blob, dtype="<u8", count=m * degree, offset=off).reshape(m, degree)
        if not np.array_equal(stored, sk.bank.block_coefficients(0)[:m]):
            raise IncompatibleSketch("hash coefficients do not match the recorded seed")
        off += coeff_bytes
        for i in range(m):
            (count,) = struct.unpack_from("<I", blob, off)
            off += 4
            sk.values[i] = np.frombuffer(blob, dtype="<u8", count=count, offset=off).astype(np.uint64)
            off += 8 * count
        if off != len(blob):
            raise InvalidArgument("trailing bytes in sketch blob")
        return sk


def sketch_insert(s: DistinctSketch, key: int) -> DistinctSketch:
    s.insert(key)
    return s


def sketch_estimate(s: DistinctSketch) -> float:
    return s.estimate()


def sketch_merge(a: DistinctSketch, b: DistinctSketch) -> DistinctSketch:
    return a.merge(b)


class ExactCounter:
    """Drop-in replacement for :class:`DistinctSketch` that stores every key (testing aid)."""

    def __init__(self):
        self.keys: set[int] = set()

    def insert(self, key: int) -> None:
        self.keys.add(int(key))

    def insert_many(self, keys) -> None:
        self.keys.update(int(k) for k in np.asarray(keys).ravel())

    def estimate(self) -> float:
        return float(len(self.keys))

    def space_bits(self) -> int:
        return 64 * len(self.keys)
