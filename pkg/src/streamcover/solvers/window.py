"""Streaming within-window cover solvers.

A solver is bound to one window, consumes that window's points pass by pass
and finally reports an over-estimate ``u`` with ``OPT_w <= u <= r_A * OPT_w``.
The driver calls :meth:`WindowSolver.end_pass` after every pass; it returns
True while the solver wants another pass.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from ..errors import ContractViolation, InvalidArgument, InvalidDelta, NotReady, OracleLimitExceeded
from ..geometry import TOLERANCE, Shift, WindowId, window_id
from .oracles import exact_udc_l2, exact_udc_linf

COORD_BITS = 64
COUNTER_BITS = 32
#: largest delta for which a radius 1 + delta*sqrt(2) disc fits in three unit discs
DELTA_MAX = (2 / math.sqrt(3) - 1) / math.sqrt(2)
DEFAULT_DELTA = 0.1
#: oracle limit used on coreset survivors; survivors are at most one per cell
CORESET_ORACLE_LIMIT = 60

_REACH = 2.0 + TOLERANCE


class SolverKind(enum.Enum):
    GRID_CORESET_L2 = "grid_coreset_l2"
    GRID_CORESET_LINF = "grid_coreset_linf"
    MULTIPASS_1D_STRIPS = "multipass_1d_strips"
    TWOPASS_BBOX_LINF = "twopass_bbox_linf"
    GREEDY_1D_WINDOW = "greedy_1d_window"
    # buffering reference solvers, unbounded memory
    EXACT_L2 = "exact_l2"
    EXACT_LINF = "exact_linf"


_RATIO = {
    SolverKind.GRID_CORESET_L2: Fraction(3),
    SolverKind.GRID_CORESET_LINF: Fraction(4),
    SolverKind.MULTIPASS_1D_STRIPS: Fraction(2),
    SolverKind.TWOPASS_BBOX_LINF: Fraction(4, 3),
    SolverKind.GREEDY_1D_WINDOW: Fraction(1),
    SolverKind.EXACT_L2: Fraction(1),
    SolverKind.EXACT_LINF: Fraction(1),
}


@dataclass(frozen=True)
class WindowSolverSpec:
    kind: SolverKind
    ell: int
    delta: float = DEFAULT_DELTA
    oracle_limit: int = CORESET_ORACLE_LIMIT

    def __post_init__(self):
        if self.ell < 1:
            raise InvalidArgument("ell must be >= 1")
        if self.kind in (SolverKind.GRID_CORESET_L2, SolverKind.GRID_CORESET_LINF):
            if not self.delta > 0:
                raise InvalidDelta("delta must be positive")
            if self.kind is SolverKind.GRID_CORESET_L2 and not self.delta < DELTA_MAX:
                raise InvalidDelta(f"delta must be below {DELTA_MAX:.5f} for the L2 coreset")
        if self.kind is SolverKind.TWOPASS_BBOX_LINF and self.ell != 2:
            raise InvalidArgument("the two-pass bounding-box solver needs ell == 2")

    @property
    def dim(self) -> int:
        return 1 if self.kind is SolverKind.GREEDY_1D_WINDOW else 2

    @property
    def ratio(self) -> Fraction:
        return _RATIO[self.kind]

    @property
    def t_max(self) -> int:
        return self.ell + 1 if self.dim == 1 else 4 * self.ell * self.ell

    @property
    def passes_required(self) -> int:
        if self.kind in (SolverKind.MULTIPASS_1D_STRIPS, SolverKind.GREEDY_1D_WINDOW):
            return self.ell + 1
        if self.kind is SolverKind.TWOPASS_BBOX_LINF:
            return 2
        return 1

    @property
    def cells_per_axis(self) -> int:
        return math.ceil(2 * self.ell / self.delta - 1e-9)


class WindowSolver:
    def __init__(self, spec: WindowSolverSpec, window: WindowId):
        if window.shift.dim != spec.dim:
            raise InvalidArgument(f"{spec.kind.value} solves {spec.dim}-dimensional windows")
        if window.shift.ell != spec.ell:
            raise InvalidArgument("window and solver disagree on ell")
        self.spec = spec
        self.window = window
        self.anchor = window.anchor
        self.current_pass = 0
        self.done = False
        self.points_seen = 0

    def process(self, p: Sequence[float], pass_index: int = 0) -> None:
        if self.done:
            raise ContractViolation("solver already finished its passes")
        if pass_index != self.current_pass:
            raise ContractViolation(f"expected pass {self.current_pass}, got {pass_index}")
        if window_id(p, self.window.shift).index != self.window.index:
            raise ContractViolation(f"point {tuple(p)} lies outside window {self.window.index}")
        self.points_seen += 1
        self._process(p, pass_index)

    def end_pass(self) -> bool:
        """Close the current pass; True means another pass is wanted."""
        if self.done:
            return False
        more = self._end_pass(self.current_pass)
        self.current_pass += 1
        if not more or self.current_pass >= self.spec.passes_required:
            self.done = True
            return False
        return True

    def finalize(self) -> int:
        if not self.done:
            raise NotReady(f"{self.spec.kind.value} solver has not completed its passes")
        return self._finalize()

    @property
    def passes_used(self) -> int:
        return self.current_pass

    @property
    def witness(self) -> int:
        """A lower bound on the window optimum (|C| for coresets)."""
        return self.finalize()

    def _process(self, p, pass_index):
        raise NotImplementedError

    def _end_pass(self, pass_index) -> bool:
        return False

    def _finalize(self) -> int:
        raise NotImplementedError

    def space_bits(self) -> int:
        raise NotImplementedError


class GridCoresetSolver(WindowSolver):
    """Keep the first point of every delta-cell; solve exactly on survivors.

    L2: each survivor disc grown by delta*sqrt(2) is covered by three unit
    discs, so ``u = 3|C|``.  L-infinity: a grown square of side 2+2*delta is
    covered by four unit squares, so ``u = 4|C|``.  Both are capped at
    ``t_max``, itself a valid cover size for the window.
    """

    def __init__(self, spec, window):
        super().__init__(spec, window)
        self.cells: dict[tuple[int, ...], tuple[float, ...]] = {}
        self._ncell = spec.cells_per_axis
        self._cover: Optional[int] = None

    def _process(self, p, pass_index):
        cell = tuple(min(self._ncell - 1, max(0, math.floor((c - a) / self.spec.delta)))
                     for c, a in zip(p, self.anchor))
        if cell not in self.cells:
            self.cells[cell] = tuple(float(c) for c in p)

    @property
    def retained(self) -> list[tuple[float, ...]]:
        return list(self.cells.values())

    @property
    def witness(self) -> int:
        if self._cover is None:
            pts = self.retained
            oracle = exact_udc_l2 if self.spec.kind is SolverKind.GRID_CORESET_L2 else exact_udc_linf
            try:
                self._cover = cached_oracle(oracle, pts, self.spec.oracle_limit)
            except OracleLimitExceeded as exc:
                raise OracleLimitExceeded(
                    f"window {self.window.index}: {len(pts)} coreset survivors exceed the exact-cover limit "
                    f"{self.spec.oracle_limit}; use a smaller ell, a sparser input or a strip/bbox solver") from exc
        return self._cover

    def _finalize(self) -> int:
        factor = 3 if self.spec.kind is SolverKind.GRID_CORESET_L2 else 4
        return min(factor * self.witness, self.spec.t_max)

    def space_bits(self) -> int:
        return self._ncell ** 2 * 2 * COORD_BITS


class StripGreedySolver(WindowSolver):
    """Multi-pass greedy interval cover along x, one instance per height-2 strip.

    In each pass a strip records its leftmost uncovered x; at pass end it
    commits an interval starting there.  A pass that commits nothing ends the
    run, so the pass count is the largest strip cover plus one.
    """

    def __init__(self, spec, window):
        super().__init__(spec, window)
        self.n_strips = 1 if spec.dim == 1 else spec.ell
        self.starts: list[list[float]] = [[] for _ in range(self.n_strips)]
        self._candidate = [math.inf] * self.n_strips

    def _strip(self, p) -> int:
        if self.n_strips == 1:
            return 0
        return min(self.n_strips - 1, max(0, math.floor((p[1] - self.anchor[1]) / 2.0)))

    def _process(self, p, pass_index):
        s = self._strip(p)
        x = float(p[0])
        starts = self.starts[s]
        if starts and x <= starts[-1] + _REACH:
            return
        if x < self._candidate[s]:
            self._candidate[s] = x

    def _end_pass(self, pass_index) -> bool:
        committed = False
        for s in range(self.n_strips):
            if self._candidate[s] < math.inf:
                self.starts[s].append(self._candidate[s])
                self._candidate[s] = math.inf
                committed = True
        return committed

    def strip_counts(self) -> list[int]:
        return [len(st) for st in self.starts]

    def _finalize(self) -> int:
        return sum(self.strip_counts())

    def space_bits(self) -> int:
        # per strip: last start, pending candidate, interval count
        return self.n_strips * (2 * COORD_BITS + COUNTER_BITS)


class BoundingBoxSolver(WindowSolver):
    """Two-pass 0/1/2/4 classifier for a 4x4 window under L-infinity.

    Pass 0 tracks the bounding box.  If it is empty or fits in a unit square
    no second pass is needed.  Otherwise pass 1 tests the six ways of placing
    two unit squares inward at two bbox corners; failing all gives 4.
    """

    def __init__(self, spec, window):
        super().__init__(spec, window)
        self.lo = [math.inf, math.inf]
        self.hi = [-math.inf, -math.inf]
        self.count = 0
        self._pairs: list[tuple[tuple[float, float], tuple[float, float]]] = []
        self._ok: list[bool] = []
        self._result: Optional[int] = None

    def _process(self, p, pass_index):
        x, y = float(p[0]), float(p[1])
        if pass_index == 0:
            self.count += 1
            self.lo = [min(self.lo[0], x), min(self.lo[1], y)]
            self.hi = [max(self.hi[0], x), max(self.hi[1], y)]
            return
        for i, (a, b) in enumerate(self._pairs):
            if self._ok[i] and not (_in_square(a, x, y) or _in_square(b, x, y)):
                self._ok[i] = False

    @property
    def bbox(self) -> Optional[tuple[tuple[float, float], tuple[float, float]]]:
        if self.count == 0:
            return None
        return (self.lo[0], self.hi[0]), (self.lo[1], self.hi[1])

    def _end_pass(self, pass_index) -> bool:
        if pass_index == 0:
            if self.count == 0:
                self._result = 0
                return False
            if self.hi[0] - self.lo[0] <= _REACH and self.hi[1] - self.lo[1] <= _REACH:
                self._result = 1
                return False
            (x0, y0), (x1, y1) = self.lo, self.hi
            corners = [(x0, y0), (x1 - 2, y0), (x0, y1 - 2), (x1 - 2, y1 - 2)]
            self._pairs = [(corners[i], corners[j]) for i in range(4) for j in range(i + 1, 4)]
            self._ok = [True] * len(self._pairs)
            return True
        self._result = 2 if any(self._ok) else 4
        return False

    def _finalize(self) -> int:
        return self._result

    def space_bits(self) -> int:
        return 4 * COORD_BITS + COUNTER_BITS + 6


def _in_square(corner, x, y) -> bool:
    cx, cy = corner
    return abs(x - (cx + 1)) <= 1 + TOLERANCE and abs(y - (cy + 1)) <= 1 + TOLERANCE


class ExactSolver(WindowSolver):
    """Buffers the window and solves it exactly at the end (reference only)."""

    def __init__(self, spec, window):
        super().__init__(spec, window)
        self.points: set[tuple[float, ...]] = set()
        self._cover: Optional[int] = None

    def _process(self, p, pass_index):
        self.points.add(tuple(float(c) for c in p))

    def _finalize(self) -> int:
        if self._cover is None:
            oracle = exact_udc_l2 if self.spec.kind is SolverKind.EXACT_L2 else exact_udc_linf
            self._cover = cached_oracle(oracle, self.points, self.spec.oracle_limit)
        return self._cover

    def space_bits(self) -> int:
        return len(self.points) * 2 * COORD_BITS


_ORACLE_CACHE: dict = {}


def cached_oracle(oracle, points: Iterable, limit: int) -> int:
    key = (oracle.__name__, frozenset(points))
    if key not in _ORACLE_CACHE:
        if len(_ORACLE_CACHE) > 100_000:
            _ORACLE_CACHE.clear()
        _ORACLE_CACHE[key] = oracle(sorted(key[1]), limit=limit) if key[1] else 0
    return _ORACLE_CACHE[key]


_CLASSES = {
    SolverKind.GRID_CORESET_L2: GridCoresetSolver,
    SolverKind.GRID_CORESET_LINF: GridCoresetSolver,
    SolverKind.MULTIPASS_1D_STRIPS: StripGreedySolver,
    SolverKind.GREEDY_1D_WINDOW: StripGreedySolver,
    SolverKind.TWOPASS_BBOX_LINF: BoundingBoxSolver,
    SolverKind.EXACT_L2: ExactSolver,
    SolverKind.EXACT_LINF: ExactSolver,
}


def make_solver(spec: WindowSolverSpec, window: WindowId) -> WindowSolver:
    return _CLASSES[spec.kind](spec, window)


def solver_capacity_bits(spec: WindowSolverSpec, observed: int = 0) -> int:
    """Worst-case state size of one solver; buffering solvers report ``observed``."""
    if spec.kind in (SolverKind.EXACT_L2, SolverKind.EXACT_LINF):
        return observed
    dummy = WindowId((0,) * spec.dim, Shift((0,) * spec.dim, spec.ell))
    return make_solver(spec, dummy).space_bits()


def solver_process(st: WindowSolver, p: Sequence[float], pass_index: int = 0) -> WindowSolver:
    st.process(p, pass_index)
    return st


def solver_finalize(st: WindowSolver) -> int:
    return st.finalize()


def run_solver(spec: WindowSolverSpec, window: WindowId, points) -> WindowSolver:
    """Feed ``points`` (all inside ``window``) through every pass the solver asks for."""
    st = make_solver(spec, window)
    pts = [tuple(p) for p in np.asarray(points, dtype=float).reshape(-1, spec.dim)]
    while True:
        k = st.current_pass
        for p in pts:
            st.process(p, k)
        if not st.end_pass():
            return st


def cover_expanded_disc(delta: float) -> list[tuple[float, float]]:
    """Centers of three unit discs covering the disc of radius 1 + delta*sqrt(2) at the origin."""
    if delta < 0 or 1 + delta * math.sqrt(2) > 2 / math.sqrt(3) + 1e-15:
        raise InvalidDelta(f"delta={delta} needs 1 + delta*sqrt(2) <= 2/sqrt(3)")
    rho = 1 / math.sqrt(3)
    return [(rho * math.cos(a), rho * math.sin(a)) for a in (0.0, 2 * math.pi / 3, 4 * math.pi / 3)]
