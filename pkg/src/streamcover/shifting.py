"""Shifting strategy: offline reference and the streaming estimator.

For a fixed shift let ``gamma_t`` be the number of windows whose solver
reports at least ``t``.  The windowed cover total is ``sum_t gamma_t``.  The
streaming estimator gets ``gamma_1`` (occupied windows) from a distinct
sketch and every ratio ``eta_t = gamma_t / gamma_1`` from ``r`` min-wise
samplers, each of which runs a solver on the occupied window of least hash.

Samplers are stored column-wise (current hash value and window key per
sampler).  A sampler can only adopt a window at that window's first point,
so every sampler holding a window has seen exactly the same substream; one
solver per held window therefore stands in for all its holders.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Sequence

import numpy as np

from . import _fastmod
from .errors import ConfigError, ContractViolation, InvalidArgument, NotReady, UnsupportedSource
from .geometry import (
    Norm,
    Shift,
    WindowId,
    decode_key,
    encode_indices,
    enumerate_shifts,
    key_universe,
    l1_to_linf_array,
    random_shift,
    window_indices,
)
from .hashing import MINWISE_C, HashBank, HashFamilyParams
from .sketches import DistinctSketch
from .solvers.window import SolverKind, WindowSolverSpec, make_solver, run_solver, solver_capacity_bits

DUMMY_KEY = np.uint64(0xFFFFFFFFFFFFFFFF)
DEFAULT_CHUNK = 8192


def sampler_count(epsilon: float, T: int) -> int:
    """Smallest r with ``2 exp(-2 r eps^2 / T^2) <= 1 / (100 T)``."""
    if not 0 < epsilon < 1:
        raise InvalidArgument("epsilon must lie in (0, 1)")
    if T < 1:
        raise InvalidArgument("T must be >= 1")
    return math.ceil(T * T * math.log(200 * T) / (2 * epsilon * epsilon))


def gamma_profile(outputs: Iterable[int], T: int) -> list[int]:
    """``[gamma_1, ..., gamma_T]`` for per-window outputs."""
    outs = np.asarray(list(outputs), dtype=np.int64)
    return [int((outs >= t).sum()) for t in range(1, T + 1)]


class ShiftMode(enum.Enum):
    RANDOM_SHIFT = "random"
    ALL_SHIFTS = "all"


@dataclass(frozen=True)
class ShiftConfig:
    solver: WindowSolverSpec
    epsilon: float = 0.2
    mode: ShiftMode = ShiftMode.RANDOM_SHIFT
    copies: int = 7
    seed: int = 0
    samplers: Optional[int] = None
    combiner: str = "min"
    c_prime: float = MINWISE_C
    norm: Optional[Norm] = None
    pinned_shift: Optional[Shift] = None

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ConfigError("epsilon must lie in (0, 1)")
        if self.copies < 1:
            raise ConfigError("copies must be >= 1")
        if self.mode is ShiftMode.RANDOM_SHIFT and self.ell < 2 * self.dim:
            raise ConfigError(f"random shifting needs ell >= 2*dim = {2 * self.dim}, got ell = {self.ell}")
        if self.samplers is not None and self.samplers < 1:
            raise ConfigError("sampler override must be >= 1")
        if self.combiner not in ("min", "median"):
            raise ConfigError("combiner must be 'min' or 'median'")
        if self.pinned_shift is not None and (self.pinned_shift.ell != self.ell or self.pinned_shift.dim != self.dim):
            raise ConfigError("pinned shift disagrees with ell/dim")

    @property
    def ell(self) -> int:
        return self.solver.ell

    @property
    def dim(self) -> int:
        return self.solver.dim

    @property
    def T(self) -> int:
        return self.solver.t_max

    @property
    def formula_samplers(self) -> int:
        return sampler_count(self.epsilon, self.T)

    @property
    def r(self) -> int:
        return self.samplers if self.samplers is not None else self.formula_samplers

    @property
    def guarantee_applies(self) -> bool:
        return self.r >= self.formula_samplers

    def ratio_bound(self) -> float:
        """Approximation ratio claimed for this configuration."""
        per_axis = 1 + (4 if self.mode is ShiftMode.RANDOM_SHIFT else 1) / self.ell
        return (1 + self.epsilon) * per_axis ** self.dim * float(self.solver.ratio)

    def shifts(self) -> list[Shift]:
        if self.pinned_shift is not None:
            return [self.pinned_shift] * (self.copies if self.mode is ShiftMode.RANDOM_SHIFT else 1)
        if self.mode is ShiftMode.ALL_SHIFTS:
            return list(enumerate_shifts(self.ell, self.dim))
        rng = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(0xA11,)))
        return [random_shift(self.ell, self.dim, rng) for _ in range(self.copies)]


@dataclass
class CoverEstimate:
    value: float
    gamma1_hat: float
    eta_hat: np.ndarray
    shift: Optional[Shift]
    diagnostics: dict = field(default_factory=dict)

    def __float__(self) -> float:
        return float(self.value)


class ShiftEstimator:
    """Single-shift streaming estimator of the windowed cover total."""

    def __init__(self, shift: Shift, solver: WindowSolverSpec, epsilon: float, samplers: Optional[int] = None,
                 seed: int = 0, c_prime: float = MINWISE_C, sketch: Optional[object] = None):
        if shift.dim != solver.dim or shift.ell != solver.ell:
            raise InvalidArgument("shift and solver disagree on ell/dim")
        self.shift = shift
        self.spec = solver
        self.epsilon = float(epsilon)
        self.T = solver.t_max
        self.formula_r = sampler_count(epsilon, self.T)
        self.r = samplers if samplers is not None else self.formula_r
        universe = key_universe(shift.dim)
        sketch_seed, bank_seed = (int(s.generate_state(1, np.uint64)[0]) for s in np.random.SeedSequence(seed).spawn(2))
        self.sketch = sketch if sketch is not None else DistinctSketch(epsilon, seed=sketch_seed, universe=universe)
        self.bank = HashBank(self.r, HashFamilyParams.for_minwise(epsilon, universe, c_prime), bank_seed)
        self.cur_hash = np.full(self.r, _fastmod.INFINITY, dtype=np.uint64)
        self.cur_key = np.full(self.r, DUMMY_KEY, dtype=np.uint64)
        self.solvers: dict[int, object] = {}
        self.pass_index = 0
        self.finished = False
        self.points_processed = 0

    # -- streaming -------------------------------------------------------
    def process(self, p: Sequence[float], pass_index: int = 0) -> None:
        self.process_batch(np.asarray([p], dtype=float), pass_index)

    def process_batch(self, points: np.ndarray, pass_index: int = 0) -> None:
        """Equivalent to calling :meth:`process` on each row in order."""
        if self.finished:
            raise ContractViolation("estimator already finished")
        if pass_index != self.pass_index:
            raise ContractViolation(f"expected pass {self.pass_index}, got {pass_index}")
        if pass_index >= self.spec.passes_required:
            raise ContractViolation("pass index beyond the solver's pass budget")
        pts = np.asarray(points, dtype=float).reshape(-1, self.shift.dim)
        if pts.shape[0] == 0:
            return
        keys = encode_indices(window_indices(pts, self.shift))
        if pass_index == 0:
            self.points_processed += pts.shape[0]
            uniq, first = np.unique(keys, return_index=True)
            ordered = uniq[np.argsort(first, kind="stable")]
            self.sketch.insert_many(ordered)
            self.bank.argmin_update(ordered, self.cur_hash, self.cur_key)
            held = set(int(k) for k in np.unique(self.cur_key) if k != DUMMY_KEY)
            for k in list(self.solvers):
                if k not in held:
                    del self.solvers[k]
            for k in held:
                if k not in self.solvers:
                    self.solvers[k] = make_solver(self.spec, WindowId(decode_key(k, self.shift.dim), self.shift))
        active = [k for k, st in self.solvers.items() if not st.done]
        if not active:
            return
        live = np.array(active, dtype=np.uint64)
        for i in np.flatnonzero(np.isin(keys, live)):
            self.solvers[int(keys[i])].process(tuple(pts[i]), pass_index)

    def end_pass(self) -> bool:
        more = False
        for st in self.solvers.values():
            if st.end_pass():
                more = True
        self.pass_index += 1
        if not more:
            self.finished = True
        return more

    # -- results ---------------------------------------------------------
    def window_outputs(self) -> dict[int, int]:
        return {k: st.finalize() for k, st in self.solvers.items()}

    def finalize(self) -> CoverEstimate:
        if not self.finished:
            raise NotReady("estimator has passes outstanding")
        gamma1 = float(self.sketch.estimate())
        eta = np.zeros(max(0, self.T - 1))
        outputs = self.window_outputs()
        if outputs:
            keys, counts = np.unique(self.cur_key, return_counts=True)
            u = np.array([outputs.get(int(k), 0) for k in keys])
            for t in range(2, self.T + 1):
                eta[t - 2] = counts[u >= t].sum() / self.r
        value = gamma1 * (1.0 + eta.sum()) if gamma1 > 0 else 0.0
        diag = {
            "samplers": self.r,
            "formula_samplers": self.formula_r,
            "held_windows": len(outputs),
            "points_processed": self.points_processed,
            "passes": self.pass_index,
            "space_bits": self.space_report(),
            "probability_budget": {"sketch": 0.99, "samplers": 0.99, "shift": 0.5},
            "guarantee_applies": self.r >= self.formula_r,
        }
        return CoverEstimate(value, gamma1, eta, self.shift, diag)

    def space_report(self) -> dict[str, int]:
        key_bits = 20 * self.shift.dim
        live = [st.space_bits() for st in self.solvers.values()]
        solver_bits = solver_capacity_bits(self.spec, max(live) if live else 0)
        counter_bits = max(1, self.points_processed.bit_length())
        report = {
            "sketch": self.sketch.space_bits(),
            "hashes": self.bank.space_bits(),
            "sampler_state": self.r * (self.bank.params.value_bits + key_bits),
            "solvers": self.r * solver_bits,
            "counters": counter_bits,
        }
        report["total"] = sum(report.values())
        return report


def iter_chunks(points, chunk: int = DEFAULT_CHUNK) -> Iterator[np.ndarray]:
    arr = np.asarray(points, dtype=float)
    for i in range(0, arr.shape[0], chunk):
        yield arr[i:i + chunk]


class PointSource:
    """A stream of point chunks.  ``seekable`` sources may be read more than once."""

    seekable = True

    def chunks(self, size: int = DEFAULT_CHUNK) -> Iterator[np.ndarray]:
        raise NotImplementedError


class ArraySource(PointSource):
    def __init__(self, points, dim: Optional[int] = None):
        arr = np.asarray(points, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, dim or 1)
        if arr.size == 0:
            arr = arr.reshape(0, dim or (arr.shape[1] if arr.ndim == 2 else 1))
        self.points = arr

    def chunks(self, size: int = DEFAULT_CHUNK):
        return iter_chunks(self.points, size)


class IteratorSource(PointSource):
    """Single-pass source over an iterator of points."""

    seekable = False

    def __init__(self, iterator: Iterable[Sequence[float]], dim: int):
        self._it = iter(iterator)
        self.dim = dim
        self._used = False

    def chunks(self, size: int = DEFAULT_CHUNK):
        if self._used:
            raise UnsupportedSource("this source cannot be read twice")
        self._used = True
        buf: list = []
        for p in self._it:
            buf.append(p)
            if len(buf) >= size:
                yield np.asarray(buf, dtype=float).reshape(-1, self.dim)
                buf = []
        if buf:
            yield np.asarray(buf, dtype=float).reshape(-1, self.dim)


def as_source(obj, dim: Optional[int] = None) -> PointSource:
    if isinstance(obj, PointSource):
        return obj
    if isinstance(obj, (np.ndarray, list, tuple)):
        return ArraySource(obj, dim)
    if dim is None:
        raise InvalidArgument("iterator sources need an explicit dimension")
    return IteratorSource(obj, dim)


def _rotated(chunks: Iterator[np.ndarray], norm: Optional[Norm]) -> Iterator[np.ndarray]:
    for c in chunks:
        yield l1_to_linf_array(c) if norm is Norm.L1 and c.shape[0] else c


def _combine(values: list[float], combiner: str) -> int:
    if combiner == "median":
        return int(np.argsort(values, kind="stable")[(len(values) - 1) // 2])
    return int(np.argmin(values))


def estimate_cover(source, cfg: ShiftConfig, chunk: int = DEFAULT_CHUNK,
                   sketch_factory: Optional[Callable[[], object]] = None) -> CoverEstimate:
    """Run every estimator of ``cfg`` jointly over ``source`` and combine them."""
    src = as_source(source, cfg.dim)
    if cfg.solver.passes_required > 1 and not src.seekable:
        raise UnsupportedSource(f"{cfg.solver.kind.value} needs a re-readable input")
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(cfg.shifts()))
    estimators = [
        ShiftEstimator(s, cfg.solver, cfg.epsilon, cfg.samplers, int(seq.generate_state(1)[0]), cfg.c_prime,
                       sketch_factory() if sketch_factory else None)
        for s, seq in zip(cfg.shifts(), seeds)
    ]
    passes = 0
    active = list(estimators)
    while active:
        for c in _rotated(src.chunks(chunk), cfg.norm):
            for est in active:
                est.process_batch(c, passes)
        passes += 1
        active = [est for est in active if est.end_pass()]
    results = [est.finalize() for est in estimators]
    values = [r.value for r in results]
    pick = _combine(values, cfg.combiner)
    best = results[pick]
    space = sum(r.diagnostics["space_bits"]["total"] for r in results)
    best.diagnostics.update({
        "mode": cfg.mode.value,
        "combiner": cfg.combiner,
        "copy_values": values,
        "copy_shifts": [list(r.shift.offsets) for r in results],
        "passes": passes,
        "total_space_bits": space,
        "per_copy_space_bits": [r.diagnostics["space_bits"] for r in results],
    })
    return best


def window_groups(points: np.ndarray, shift: Shift) -> dict[int, np.ndarray]:
    """Points of each occupied window, keyed by encoded window id, in stream order."""
    pts = np.asarray(points, dtype=float).reshape(-1, shift.dim)
    if pts.shape[0] == 0:
        return {}
    keys = encode_indices(window_indices(pts, shift))
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    bounds = np.flatnonzero(np.diff(sk)) + 1
    return {int(g[0]): pts[order[s:e]] for g, s, e in zip(np.split(sk, bounds), np.r_[0, bounds], np.r_[bounds, len(sk)])}


def offline_window_outputs(points, spec: WindowSolverSpec, shift: Shift) -> dict[int, int]:
    return {k: run_solver(spec, WindowId(decode_key(k, shift.dim), shift), g).finalize()
            for k, g in window_groups(points, shift).items()}


def offline_shift_total(points, spec: WindowSolverSpec, shift: Shift) -> int:
    return sum(offline_window_outputs(points, spec, shift).values())


def offline_shift_cover(points, cfg: ShiftConfig) -> int:
    """Exact (sketch-free) shifting: sum of window solutions, minimised over shifts."""
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return 0
    pts = pts.reshape(-1, cfg.dim)
    if cfg.norm is Norm.L1:
        pts = l1_to_linf_array(pts)
    if cfg.mode is ShiftMode.ALL_SHIFTS and cfg.pinned_shift is None:
        shifts = list(enumerate_shifts(cfg.ell, cfg.dim))
    else:
        shifts = cfg.shifts()[:1]
    return min(offline_shift_total(pts, cfg.solver, s) for s in shifts)
