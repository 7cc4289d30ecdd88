"""Experiment orchestration: one configuration in, one record out."""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from ..errors import ConfigError, InvalidArgument, OracleLimitExceeded, UnsupportedSource
from ..generators import Instance, generate, parse_instance_spec
from ..geometry import Norm
from ..practical import LatticeSpec, lattice_estimate
from ..shifting import ArraySource, ShiftConfig, ShiftMode, estimate_cover, offline_shift_cover, sampler_count
from ..solvers.oracles import ORACLE_LIMIT, exact_cover
from ..solvers.window import DEFAULT_DELTA, SolverKind, WindowSolverSpec
from .io import FileSource

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class AlgoInfo:
    family: str  # shift | lattice | offline
    norms: tuple[Norm, ...]
    dim: int = 2
    kind: Optional[SolverKind] = None
    mode: ShiftMode = ShiftMode.RANDOM_SHIFT
    default_copies: int = 7


ALGORITHMS: dict[str, AlgoInfo] = {
    "shift-l2": AlgoInfo("shift", (Norm.L2,), kind=SolverKind.GRID_CORESET_L2),
    "shift-linf": AlgoInfo("shift", (Norm.LINF, Norm.L1), kind=SolverKind.GRID_CORESET_LINF),
    "shift-1dstrips": AlgoInfo("shift", (Norm.L2, Norm.LINF, Norm.L1), dim=1, kind=SolverKind.GREEDY_1D_WINDOW),
    "twopass-linf": AlgoInfo("shift", (Norm.LINF, Norm.L1), kind=SolverKind.TWOPASS_BBOX_LINF,
                             mode=ShiftMode.ALL_SHIFTS, default_copies=1),
    "multipass-linf": AlgoInfo("shift", (Norm.LINF, Norm.L1), kind=SolverKind.MULTIPASS_1D_STRIPS),
    "lattice-l2": AlgoInfo("lattice", (Norm.L2,), default_copies=10),
    "lattice-linf": AlgoInfo("lattice", (Norm.LINF,), default_copies=1),
    "lattice-l1": AlgoInfo("lattice", (Norm.L1,), default_copies=1),
    "offline-exact": AlgoInfo("offline", (Norm.L2, Norm.LINF, Norm.L1), dim=0, default_copies=1),
    "offline-shift": AlgoInfo("offline", (Norm.L2, Norm.LINF, Norm.L1), dim=0, mode=ShiftMode.ALL_SHIFTS,
                              default_copies=1),
}


@dataclass(frozen=True)
class RunConfig:
    algo: str
    epsilon: float = 0.2
    ell: int = 4
    dim: int = 2
    norm: Optional[str] = None
    seed: int = 0
    copies: Optional[int] = None
    samplers: Optional[int] = None
    input: Optional[str] = None
    gen: Optional[str] = None
    output: Optional[str] = None
    oracle: str = "auto"
    fmt: str = "text"
    radius: Optional[float] = None
    combiner: str = "min"
    delta: float = DEFAULT_DELTA

    @property
    def info(self) -> AlgoInfo:
        return ALGORITHMS[self.algo]

    @property
    def resolved_norm(self) -> Norm:
        return Norm.parse(self.norm) if self.norm else self.info.norms[0]

    @property
    def resolved_copies(self) -> int:
        return self.copies if self.copies is not None else self.info.default_copies

    def validate(self) -> None:
        if self.algo not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algo!r}; choose from {', '.join(ALGORITHMS)}")
        if (self.input is None) == (self.gen is None):
            raise ConfigError("give exactly one of --input and --gen")
        if not 0 < self.epsilon < 1:
            raise ConfigError("epsilon must lie in (0, 1)")
        if self.ell < 1:
            raise ConfigError("ell must be >= 1")
        if self.copies is not None and self.copies < 1:
            raise ConfigError("copies must be >= 1")
        if self.samplers is not None and self.samplers < 1:
            raise ConfigError("samplers must be >= 1")
        if self.oracle not in ("auto", "off"):
            raise ConfigError("oracle must be 'auto' or 'off'")
        if self.radius is not None and not self.radius > 0:
            raise ConfigError("radius must be positive")
        info = self.info
        try:
            norm = self.resolved_norm
        except InvalidArgument as exc:
            raise ConfigError(str(exc)) from None
        if norm not in info.norms:
            raise ConfigError(f"{self.algo} does not support the {norm.value} norm")
        if info.dim and self.dim != info.dim:
            raise ConfigError(f"{self.algo} needs dim = {info.dim}")
        if info.family == "lattice" and self.dim != 2:
            raise ConfigError("lattice estimators are planar")
        if info.family == "offline" and self.dim not in (1, 2):
            raise ConfigError("offline oracles support dim 1 and 2")
        if self.algo == "offline-shift":
            self.shift_config()
        if info.family == "shift":
            self.shift_config()

    def solver_spec(self) -> WindowSolverSpec:
        info = self.info
        kind = info.kind
        if self.algo == "offline-shift":
            if self.dim == 1:
                kind = SolverKind.GREEDY_1D_WINDOW
            else:
                kind = SolverKind.EXACT_L2 if self.resolved_norm is Norm.L2 else SolverKind.EXACT_LINF
        try:
            return WindowSolverSpec(kind, self.ell, self.delta)
        except InvalidArgument as exc:
            raise ConfigError(str(exc)) from None

    def shift_config(self) -> ShiftConfig:
        info = self.info
        norm = Norm.L1 if self.resolved_norm is Norm.L1 else None
        copies = self.resolved_copies if info.mode is ShiftMode.RANDOM_SHIFT else 1
        try:
            return ShiftConfig(self.solver_spec(), self.epsilon, info.mode, copies, self.seed, self.samplers,
                               self.combiner, norm=norm)
        except InvalidArgument as exc:
            raise ConfigError(str(exc)) from None


@dataclass
class RunRecord:
    config: dict
    estimate: float
    opt: Optional[int]
    opt_source: Optional[str]
    ratio: Optional[float]
    bound: Optional[float]
    space_bits: dict
    passes: int
    points_processed: int
    wall_time_s: float
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"schema": SCHEMA_VERSION}
        out.update(asdict(self))
        if out["bound"] is None:
            del out["bound"]
        return out


def _load(cfg: RunConfig):
    """Return (source, materialised points or None, certified OPT, metadata)."""
    if cfg.gen is not None:
        spec = parse_instance_spec(cfg.gen)
        inst: Instance = generate(spec).normalized()
        if inst.dim != cfg.dim:
            raise ConfigError(f"generator produced {inst.dim}-dimensional points, config says dim = {cfg.dim}")
        return ArraySource(inst.points, cfg.dim), inst.points, inst.certified_opt, dict(inst.metadata)
    src = FileSource(cfg.input, cfg.fmt, cfg.dim, cfg.radius)
    return src, None, None, {"input": cfg.input}


def _oracle_opt(cfg: RunConfig, points: np.ndarray) -> Optional[int]:
    if points.shape[0] == 0:
        return 0
    if cfg.dim == 1:
        return exact_cover(points, cfg.resolved_norm)
    if np.unique(points, axis=0).shape[0] > ORACLE_LIMIT:
        return None
    return exact_cover(points, cfg.resolved_norm)


def _bound(cfg: RunConfig, shift_cfg: Optional[ShiftConfig]) -> Optional[float]:
    info = cfg.info
    if info.family == "shift":
        return shift_cfg.ratio_bound() if shift_cfg.guarantee_applies else None
    if cfg.algo == "lattice-l2":
        return 2 * math.pi * (1 + cfg.epsilon)
    if info.family == "lattice":
        return 4 * (1 + cfg.epsilon)
    if cfg.algo == "offline-exact":
        return 1.0
    return (1 + 1 / cfg.ell) ** cfg.dim


def run_experiment(cfg: RunConfig) -> RunRecord:
    cfg.validate()
    info = cfg.info
    shift_cfg = cfg.shift_config() if info.family == "shift" or cfg.algo == "offline-shift" else None
    source, points, certified, meta = _load(cfg)
    if shift_cfg is not None and shift_cfg.solver.passes_required > 1 and not source.seekable:
        raise UnsupportedSource(f"{cfg.algo} makes several passes and needs a re-readable input")
    if info.family == "offline" and points is None:
        if not source.seekable:
            raise UnsupportedSource("offline algorithms need a file input")
        points = source.materialize()

    start = time.perf_counter()
    diagnostics: dict = {}
    if info.family == "shift":
        est = estimate_cover(source, shift_cfg)
        value = float(est.value)
        d = est.diagnostics
        space = {
            "per_copy": [b["total"] for b in d["per_copy_space_bits"]],
            "sketch": sum(b["sketch"] for b in d["per_copy_space_bits"]),
            "hashes": sum(b["hashes"] for b in d["per_copy_space_bits"]),
            "sampler_state": sum(b["sampler_state"] for b in d["per_copy_space_bits"]),
            "solvers": sum(b["solvers"] for b in d["per_copy_space_bits"]),
            "counters": sum(b["counters"] for b in d["per_copy_space_bits"]),
            "total": d["total_space_bits"],
        }
        passes, n = d["passes"], d["points_processed"]
        diagnostics = {
            "copy_values": d["copy_values"],
            "copy_shifts": d["copy_shifts"],
            "gamma1_hat": est.gamma1_hat,
            "eta_hat": [float(x) for x in est.eta_hat],
            "samplers": d["samplers"],
            "formula_samplers": d["formula_samplers"],
            "held_windows": d["held_windows"],
            "mode": d["mode"],
            "combiner": d["combiner"],
        }
    elif info.family == "lattice":
        spec = LatticeSpec(cfg.resolved_norm, copies=cfg.resolved_copies)
        est = lattice_estimate(source, spec, cfg.epsilon, cfg.seed)
        value, passes, n = float(est.value), 1, est.points_processed
        space = {"sketches": est.space_bits, "total": est.space_bits}
        diagnostics = {"copy_values": est.copy_values, "offsets": [list(o) for o in est.offsets]}
    else:
        n, passes = int(points.shape[0]), 1
        if cfg.algo == "offline-exact":
            limit = max(ORACLE_LIMIT, np.unique(points, axis=0).shape[0]) if cfg.dim == 1 else ORACLE_LIMIT
            try:
                value = float(exact_cover(points, cfg.resolved_norm, limit=limit))
            except OracleLimitExceeded as exc:
                raise ConfigError(f"offline-exact: {exc}") from None
        else:
            value = float(offline_shift_cover(points, shift_cfg))
        space = {"points": int(points.size) * 64, "total": int(points.size) * 64}
    wall = time.perf_counter() - start

    opt, opt_source = None, None
    if certified is not None:
        opt, opt_source = int(certified), "certified"
    elif cfg.oracle == "auto":
        if points is None and source.seekable:
            points = source.materialize()
        if points is not None:
            opt = _oracle_opt(cfg, points)
            opt_source = "oracle" if opt is not None else None
    ratio = None
    if opt is not None:
        ratio = value / opt if opt > 0 else (1.0 if value == 0 else math.inf)
    config = asdict(cfg)
    config.update(norm=cfg.resolved_norm.value, copies=cfg.resolved_copies)
    if shift_cfg is not None:
        config["samplers_formula"] = sampler_count(cfg.epsilon, shift_cfg.T)
    diagnostics.update(meta=meta)
    return RunRecord(config, value, opt, opt_source, ratio, _bound(cfg, shift_cfg), space, passes, n, wall,
                     diagnostics)
