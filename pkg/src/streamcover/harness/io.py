"""Point-file ingestion.

Text format: one point per line, whitespace-separated decimal coordinates.
Lines whose first non-blank character is ``#`` are comments; a comment of the
form ``# radius=R`` declares the ball radius of the instance, which is
normalised away at ingestion.  Blank lines are skipped.
"""
from __future__ import annotations

import io
import math
import sys
from typing import IO, Iterator, Optional, Union

import numpy as np

from ..errors import InputError, UnsupportedSource
from ..geometry import COORD_BOUND
from ..shifting import DEFAULT_CHUNK, PointSource

FORMATS = ("text",)


def _lines(source) -> Iterator[str]:
    for raw in source:
        yield raw.decode("utf-8") if isinstance(raw, bytes) else raw


def parse_points(source: Union[IO, str, bytes], fmt: str = "text", dim: Optional[int] = None,
                 scale: float = 1.0) -> Iterator[tuple[float, ...]]:
    """Yield points one at a time; raises :class:`InputError` with the offending line number."""
    if fmt not in FORMATS:
        raise InputError(f"unknown input format {fmt!r}")
    if isinstance(source, (str, bytes)):
        source = io.StringIO(source.decode("utf-8") if isinstance(source, bytes) else source)
    for lineno, line in enumerate(_lines(source), start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        try:
            coords = tuple(float(tok) for tok in text.split())
        except ValueError:
            raise InputError(f"cannot parse {text[:40]!r} as coordinates", lineno) from None
        if dim is None:
            dim = len(coords)
        elif len(coords) != dim:
            raise InputError(f"expected {dim} coordinates, found {len(coords)}", lineno)
        if not all(math.isfinite(c) and abs(c) <= COORD_BOUND for c in coords):
            raise InputError("coordinates must be finite and within the coordinate bound", lineno)
        yield tuple(c / scale for c in coords) if scale != 1.0 else coords


def read_header(source: IO) -> dict[str, str]:
    """``key=value`` pairs from the leading comment block."""
    meta: dict[str, str] = {}
    for line in _lines(source):
        text = line.strip()
        if not text:
            continue
        if not text.startswith("#"):
            break
        key, eq, val = text.lstrip("#").strip().partition("=")
        if eq:
            meta[key.strip()] = val.strip()
    return meta


class FileSource(PointSource):
    """Points from a file path; ``"-"`` means standard input, which can be read only once."""

    def __init__(self, path: str, fmt: str = "text", dim: Optional[int] = None, radius: Optional[float] = None):
        self.path = path
        self.fmt = fmt
        self.dim = dim
        self.seekable = path != "-"
        self.points_read = 0
        self._reads = 0
        if radius is None and self.seekable:
            with open(path, encoding="utf-8") as fh:
                radius = float(read_header(fh).get("radius", 1.0))
        self.radius = float(radius or 1.0)

    def _open(self):
        if not self.seekable:
            return sys.stdin
        return open(self.path, encoding="utf-8")

    def iter_points(self) -> Iterator[tuple[float, ...]]:
        if not self.seekable and self._reads:
            raise UnsupportedSource("standard input can only be read once")
        self._reads += 1
        fh = self._open()
        try:
            for p in parse_points(fh, self.fmt, self.dim, self.radius):
                if self.dim is None:
                    self.dim = len(p)
                yield p
        finally:
            if fh is not sys.stdin:
                fh.close()

    def chunks(self, size: int = DEFAULT_CHUNK) -> Iterator[np.ndarray]:
        buf: list = []
        count = 0
        for p in self.iter_points():
            buf.append(p)
            count += 1
            if len(buf) >= size:
                yield np.asarray(buf, dtype=float)
                buf = []
        if buf:
            yield np.asarray(buf, dtype=float)
        self.points_read = count

    def materialize(self) -> np.ndarray:
        parts = list(self.chunks())
        return np.concatenate(parts) if parts else np.empty((0, self.dim or 2))
