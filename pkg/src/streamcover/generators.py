"""Synthetic and adversarial instances, with certified optima where they are known."""
from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, field
from typing import Optional, TextIO

import numpy as np

from .errors import InvalidArgument


class InstanceKind(enum.Enum):
    UNIFORM_BOX = "uniform"
    SEPARATED_CLUSTERS = "clusters"
    GRID_ADVERSARIAL = "grid"
    INDEX_CIRCLE = "index"


_DEFAULTS = {
    InstanceKind.UNIFORM_BOX: {"box": 100.0, "dim": 2},
    InstanceKind.SEPARATED_CLUSTERS: {"k": 50, "diameter": 0.1, "separation": None, "ell": 5},
    InstanceKind.GRID_ADVERSARIAL: {"pairs": None, "gap": 0.9},
    InstanceKind.INDEX_CIRCLE: {"z": None, "i": None, "probe": True},
}


@dataclass(frozen=True)
class InstanceSpec:
    kind: InstanceKind
    n: int = 1000
    seed: int = 0
    params: dict = field(default_factory=dict, hash=False)

    def __post_init__(self):
        kind = self.kind if isinstance(self.kind, InstanceKind) else InstanceKind(self.kind)
        object.__setattr__(self, "kind", kind)
        unknown = set(self.params) - set(_DEFAULTS[kind])
        if unknown:
            raise InvalidArgument(f"unknown parameters for {kind.value}: {sorted(unknown)}")
        if self.n < 0:
            raise InvalidArgument("n must be non-negative")

    def param(self, name: str):
        return self.params.get(name, _DEFAULTS[self.kind][name])


@dataclass
class Instance:
    points: np.ndarray
    certified_opt: Optional[int] = None
    radius: float = 1.0
    metadata: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    def normalized(self) -> "Instance":
        """Rescale so that the covering balls have unit radius."""
        if self.radius == 1.0:
            return self
        return Instance(self.points / self.radius, self.certified_opt, 1.0, dict(self.metadata, scaled_from=self.radius))


def parse_instance_spec(text: str) -> InstanceSpec:
    """Parse ``"kind:key=value,key=value"``, e.g. ``"clusters:k=50,seed=3"``."""
    kind_s, _, rest = text.partition(":")
    try:
        kind = InstanceKind(kind_s.strip().lower())
    except ValueError:
        raise InvalidArgument(f"unknown generator {kind_s!r}") from None
    n, seed, params = None, 0, {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise InvalidArgument(f"expected key=value, got {item!r}")
        key = key.strip()
        if key == "n":
            n = int(val)
        elif key == "seed":
            seed = int(val)
        elif key == "z":
            params["z"] = val.strip()
        elif key == "probe":
            params["probe"] = val.strip().lower() in ("1", "true", "yes")
        elif key in ("k", "ell", "pairs", "i", "dim"):
            params[key] = int(val)
        else:
            params[key] = float(val)
    if n is None:
        n = 20 * int(params.get("k", _DEFAULTS[kind]["k"])) if kind is InstanceKind.SEPARATED_CLUSTERS else 1000
    return InstanceSpec(kind, n, seed, params)


def _uniform(spec: InstanceSpec, rng) -> Instance:
    box, dim = float(spec.param("box")), int(spec.param("dim"))
    if box <= 0 or dim < 1:
        raise InvalidArgument("box must be positive and dim >= 1")
    return Instance(rng.uniform(0.0, box, size=(spec.n, dim)), metadata={"box": box})


def _clusters(spec: InstanceSpec, rng) -> Instance:
    k = int(spec.param("k"))
    diameter = float(spec.param("diameter"))
    ell = int(spec.param("ell"))
    sep = spec.param("separation")
    sep = float(sep) if sep is not None else max(10.0, 10.0 * ell)
    if k < 1 or spec.n < k:
        raise InvalidArgument("need 1 <= k <= n")
    if not 0 <= diameter <= 0.1 or sep < 10:
        raise InvalidArgument("clusters need diameter <= 0.1 and separation >= 10")
    # every even grid line is a window boundary under some shift, so each
    # cluster is kept strictly inside one cell [2a, 2a+2) x [2b, 2b+2)
    side = math.ceil(math.sqrt(k))
    pitch = 2 * math.ceil((sep + 1.0 + diameter) / 2)
    cells = rng.permutation(side * side)[:k]
    jitter = rng.uniform(-0.5, 0.5, size=(k, 2))
    centers = np.stack([cells % side, cells // side], axis=1) * pitch + 1.0 + jitter
    labels = np.concatenate([np.arange(k), rng.integers(0, k, size=spec.n - k)])
    r = diameter / 2 * np.sqrt(rng.uniform(0, 1, spec.n))
    a = rng.uniform(0, 2 * math.pi, spec.n)
    pts = centers[labels] + np.stack([r * np.cos(a), r * np.sin(a)], axis=1)
    return Instance(pts, certified_opt=k, metadata={"k": k, "separation": sep, "diameter": diameter})


def _grid(spec: InstanceSpec, rng) -> Instance:
    pairs = spec.param("pairs")
    pairs = int(pairs) if pairs is not None else spec.n // 2
    gap = float(spec.param("gap"))
    if pairs < 1 or not 0 < gap <= 1:
        raise InvalidArgument("need pairs >= 1 and 0 < gap <= 1")
    per_row = 32
    m = np.arange(pairs)
    a = 10 * (m % per_row) + rng.integers(0, 3, size=pairs)
    y = 12.0 * (m // per_row) + rng.uniform(0, 2, size=pairs)
    left = np.stack([2.0 * a - gap, y], axis=1)
    right = np.stack([2.0 * a + gap, y], axis=1)
    pts = np.empty((2 * pairs, 2))
    pts[0::2], pts[1::2] = left, right
    return Instance(pts, certified_opt=pairs, metadata={"pairs": pairs, "gap": gap})


def index_bits(spec: InstanceSpec, rng) -> str:
    z = spec.param("z")
    if z is None:
        z = "".join("1" if b else "0" for b in rng.integers(0, 2, size=spec.n))
    if len(z) != spec.n or set(z) - {"0", "1"}:
        raise InvalidArgument("z must be a bit string of length n")
    return z


def _index(spec: InstanceSpec, rng) -> Instance:
    n = spec.n
    if n < 3:
        raise InvalidArgument("the circle construction needs n >= 3")
    z = index_bits(spec, rng)
    i = spec.param("i")
    i = n if i is None else int(i)
    if not 1 <= i <= n:
        raise InvalidArgument("index i must lie in 1..n")
    theta = 2 * math.pi / n
    alice = [(math.cos(j * theta), math.sin(j * theta)) for j in range(1, n + 1) if z[j - 1] == "1"]
    pts = list(alice)
    probe = bool(spec.param("probe"))
    if probe:
        # the probe sits opposite point i; for i = n this is the unrotated construction
        px = (1 + math.cos(theta)) / 2 - 4
        rot = -(n - i) * theta
        pts.append((px * math.cos(rot), px * math.sin(rot)))
    bit = z[i - 1] == "1"
    if probe:
        opt = 2 if bit else 1
    else:
        opt = 1 if alice else 0
    arr = np.asarray(pts, dtype=float).reshape(-1, 2)
    return Instance(arr, certified_opt=opt, radius=2.0, metadata={"z": z, "i": i, "probe": probe})


_BUILDERS = {
    InstanceKind.UNIFORM_BOX: _uniform,
    InstanceKind.SEPARATED_CLUSTERS: _clusters,
    InstanceKind.GRID_ADVERSARIAL: _grid,
    InstanceKind.INDEX_CIRCLE: _index,
}


def generate(spec: InstanceSpec) -> Instance:
    """Build the instance; deterministic in ``spec``."""
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed, spawn_key=(list(InstanceKind).index(spec.kind),)))
    inst = _BUILDERS[spec.kind](spec, rng)
    inst.metadata.setdefault("kind", spec.kind.value)
    inst.metadata.setdefault("seed", spec.seed)
    return inst


def write_points(points, out: TextIO, metadata: Optional[dict] = None) -> None:
    """Text format: ``# key=value`` header lines, then one point per line (round-trip exact)."""
    for k, v in (metadata or {}).items():
        out.write(f"# {k}={v}\n")
    for p in np.asarray(points, dtype=float):
        out.write(" ".join(repr(float(c)) for c in p))
        out.write("\n")


def points_text(points, metadata: Optional[dict] = None) -> str:
    buf = io.StringIO()
    write_points(points, buf, metadata)
    return buf.getvalue()
