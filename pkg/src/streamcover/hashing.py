"""r-wise independent polynomial hashing and min-wise window sampling."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import _fastmod
from ._fastmod import MERSENNE61
from .errors import InvalidArgument, InvalidKey
from .geometry import WindowId

#: default c' in degree = ceil(c' * log2(1/eps)) for min-wise families
MINWISE_C = 8.0
#: rows per deterministically seeded coefficient block of a HashBank
BANK_BLOCK = 4096


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # deterministic for n < 3.3e24
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def minwise_degree(epsilon: float, c_prime: float = MINWISE_C) -> int:
    if not 0 < epsilon < 1:
        raise InvalidArgument("epsilon must lie in (0, 1)")
    return max(2, math.ceil(c_prime * math.log2(1.0 / epsilon)))


@dataclass(frozen=True)
class HashFamilyParams:
    degree: int
    universe: int = MERSENNE61
    prime: int = MERSENNE61

    def __post_init__(self):
        if self.degree < 2:
            raise InvalidArgument("degree (number of coefficients) must be >= 2")
        if not is_prime(self.prime):
            raise InvalidArgument(f"{self.prime} is not prime")
        if not 1 <= self.universe <= self.prime:
            raise InvalidArgument("universe size must satisfy 1 <= k <= p")

    @classmethod
    def for_minwise(cls, epsilon: float, universe: int = MERSENNE61,
                    c_prime: float = MINWISE_C) -> "HashFamilyParams":
        return cls(minwise_degree(epsilon, c_prime), universe)

    @property
    def value_bits(self) -> int:
        return self.prime.bit_length()


@dataclass(frozen=True)
class PolyHashFn:
    """``x -> a[r-1] x^(r-1) + ... + a[0] (mod p)`` over keys ``0 <= x < universe``."""

    coefficients: tuple[int, ...]
    prime: int = MERSENNE61
    universe: int = MERSENNE61

    def __call__(self, x: int) -> int:
        return hash_eval(self, x)

    @property
    def degree(self) -> int:
        return len(self.coefficients)

    def space_bits(self) -> int:
        return self.degree * self.prime.bit_length()


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _draw_coefficients(prime: int, shape, gen: np.random.Generator) -> np.ndarray:
    if prime < (1 << 63):
        return gen.integers(0, prime, size=shape, dtype=np.uint64)
    raise InvalidArgument("primes of 63 bits or more are not supported")


def draw_hash(params: HashFamilyParams, rng=None) -> PolyHashFn:
    gen = _as_generator(rng)
    coeffs = _draw_coefficients(params.prime, params.degree, gen)
    return PolyHashFn(tuple(int(c) for c in coeffs), params.prime, params.universe)


def hash_eval(h: PolyHashFn, x: int) -> int:
    x = int(x)
    if not 0 <= x < h.universe:
        raise InvalidKey(f"key {x} outside [0, {h.universe})")
    acc = 0
    for a in reversed(h.coefficients):
        acc = (acc * x + a) % h.prime
    return acc


class HashBank:
    """``count`` independent hash functions from one family, evaluated in bulk.

    Coefficients of rows ``[b*BANK_BLOCK, (b+1)*BANK_BLOCK)`` come from a
    generator seeded by ``(seed, b)``, so they can be regenerated on demand
    instead of held in memory.  Only the Mersenne prime is supported here.
    """

    def __init__(self, count: int, params: HashFamilyParams, seed: int, *, cache: Optional[bool] = None):
        if count < 1:
            raise InvalidArgument("a hash bank needs at least one function")
        if params.prime != MERSENNE61:
            raise InvalidArgument("HashBank only supports p = 2**61 - 1")
        if params.degree > _fastmod.MAX_DEGREE:
            raise InvalidArgument(f"degree above {_fastmod.MAX_DEGREE} is not supported")
        self.count = count
        self.params = params
        self.seed = int(seed)
        if cache is None:
            cache = count * params.degree <= (1 << 20)
        self._cache: Optional[list[np.ndarray]] = None
        if cache:
            self._cache = [_fastmod.coefficient_limbs(self.block_coefficients(b)) for b in range(self.n_blocks)]

    @property
    def n_blocks(self) -> int:
        return -(-self.count // BANK_BLOCK)

    def block_coefficients(self, b: int) -> np.ndarray:
        rows = min(BANK_BLOCK, self.count - b * BANK_BLOCK)
        gen = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(b,)))
        full = _draw_coefficients(self.params.prime, (BANK_BLOCK, self.params.degree), gen)
        return full[:rows]

    def _block_limbs(self, b: int) -> np.ndarray:
        if self._cache is not None:
            return self._cache[b]
        return _fastmod.coefficient_limbs(self.block_coefficients(b))

    def hash_fn(self, j: int) -> PolyHashFn:
        if not 0 <= j < self.count:
            raise IndexError(j)
        b, row = divmod(j, BANK_BLOCK)
        coeffs = self.block_coefficients(b)[row]
        return PolyHashFn(tuple(int(c) for c in coeffs), self.params.prime, self.params.universe)

    def _check_keys(self, keys) -> np.ndarray:
        keys = np.ascontiguousarray(keys, dtype=np.uint64)
        if keys.ndim != 1:
            raise InvalidArgument("keys must be one-dimensional")
        if keys.size and int(keys.max()) >= self.params.universe:
            raise InvalidKey(f"key {int(keys.max())} outside [0, {self.params.universe})")
        return keys

    def evaluate(self, keys) -> np.ndarray:
        """Hash values, shape ``(count, len(keys))``."""
        keys = self._check_keys(keys)
        out = np.empty((self.count, keys.shape[0]), dtype=np.uint64)
        if keys.size == 0:
            return out
        op = _fastmod.key_operand(keys, self.params.degree)
        for b in range(self.n_blocks):
            pl = _fastmod.planes(self._block_limbs(b), op)
            out[b * BANK_BLOCK:b * BANK_BLOCK + pl.shape[0]] = _fastmod.values_from_planes(pl)
        return out

    def argmin_update(self, keys, best_h: np.ndarray, best_key: np.ndarray, chunk: int = 256) -> None:
        """Offer ``keys`` in order to every function; replace incumbents on strictly smaller hash."""
        keys = self._check_keys(keys)
        if keys.size == 0:
            return
        chunks = [keys[c0:c0 + chunk] for c0 in range(0, keys.shape[0], chunk)]
        ops = [_fastmod.key_operand(ck, self.params.degree) for ck in chunks]
        for b in range(self.n_blocks):
            limbs = self._block_limbs(b)
            lo = b * BANK_BLOCK
            hi = lo + limbs.shape[0]
            for ck, op in zip(chunks, ops):
                _fastmod.argmin_update(_fastmod.planes(limbs, op), ck, best_h[lo:hi], best_key[lo:hi])

    def space_bits(self) -> int:
        return self.count * self.params.degree * self.params.value_bits


class Action(enum.Enum):
    FEED = "feed"
    ADOPT_RESET = "adopt_reset"
    IGNORE = "ignore"


@dataclass
class MinWiseSampler:
    """Tracks the occupied window of least hash and a solver fed that window's points.

    ``solver_factory`` builds a fresh solver for a newly adopted window.
    """

    hash: PolyHashFn
    solver_factory: Optional[Callable[[WindowId], object]] = None
    current_window: Optional[WindowId] = None
    current_hash_value: float = math.inf
    solver: object = None
    fed: list = field(default_factory=list, repr=False)
    record: bool = False

    def offer(self, w: WindowId, p: Sequence[float]) -> Action:
        return minwise_offer(self, w, p)


def minwise_offer(sampler: MinWiseSampler, w: WindowId, p: Sequence[float], pass_index: int = 0) -> Action:
    if sampler.current_window is not None and w == sampler.current_window:
        _feed(sampler, p, pass_index)
        return Action.FEED
    hv = hash_eval(sampler.hash, w.encode())
    if hv < sampler.current_hash_value:
        sampler.current_window = w
        sampler.current_hash_value = hv
        sampler.solver = sampler.solver_factory(w) if sampler.solver_factory else None
        sampler.fed = []
        _feed(sampler, p, pass_index)
        return Action.ADOPT_RESET
    return Action.IGNORE


def _feed(sampler: MinWiseSampler, p, pass_index: int) -> None:
    if sampler.record:
        sampler.fed.append(tuple(p))
    if sampler.solver is not None:
        sampler.solver.process(p, pass_index)
