"""Geometric data model, rigid motions, and the MIN1 minutiae file format.

The MIN1 format is the canonical interchange format for minutiae in this
toolkit (UTF-8 text):

    MIN1
    CORE <x> <y>            # optional, at most one, before any minutia
    <x> <y> <theta> <E|B>   # one line per minutia
    ...

Lines starting with ``#`` and blank lines are ignored (except line 1, which
must be the header). Coordinates are written with 9 significant digits, so
any parsed file round-trips byte-identically through
``parse_minutiae(serialize_minutiae(s))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import DuplicatePoint, EmptySet, MalformedHeader, MalformedLine, MissingCore

TWO_PI = 2.0 * math.pi


def wrap_angle(theta: float) -> float:
    """Wrap an angle into [0, 2*pi)."""
    t = math.fmod(theta, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    return 0.0 if t >= TWO_PI else t


def fmt_real(v: float, sig_digits: int = 9) -> str:
    """Format a real with the given significant digits (9 is the on-disk
    default; 17 round-trips float64 exactly)."""
    return format(float(v), f".{sig_digits}g")


class MinutiaKind(Enum):
    ENDING = "E"
    BIFURCATION = "B"


@dataclass(frozen=True)
class Minutia:
    """A ridge ending or bifurcation: position in pixels, direction in radians."""

    x: float
    y: float
    theta: float
    kind: MinutiaKind = MinutiaKind.ENDING

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("minutia coordinates must be finite")
        if not math.isfinite(self.theta):
            raise ValueError("minutia direction must be finite")
        object.__setattr__(self, "theta", wrap_angle(self.theta))


@dataclass(frozen=True)
class CorePoint:
    """Reference singular point used to center all downstream features."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("core coordinates must be finite")


@dataclass(frozen=True)
class RigidTransform:
    """Rotation about a pivot followed by a translation. No scaling."""

    rotation: float = 0.0
    translation: tuple[float, float] = (0.0, 0.0)
    pivot: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        vals = (self.rotation, *self.translation, *self.pivot)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("transform parameters must be finite")
        object.__setattr__(self, "rotation", wrap_angle(self.rotation))

    def inverse(self) -> "RigidTransform":
        """Transform that undoes this one (rotate back about the moved pivot)."""
        dx, dy = self.translation
        px, py = self.pivot
        return RigidTransform(
            rotation=-self.rotation,
            translation=(-dx, -dy),
            pivot=(px + dx, py + dy),
        )


@dataclass(frozen=True)
class MinutiaeSet:
    """Ordered minutiae of one impression plus an optional core point."""

    minutiae: tuple[Minutia, ...]
    core: CorePoint | None = None
    source_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "minutiae", tuple(self.minutiae))

    def __len__(self) -> int:
        return len(self.minutiae)

    def coords(self) -> np.ndarray:
        """(n, 2) float64 array of minutia positions, in file order."""
        return np.array([(m.x, m.y) for m in self.minutiae], dtype=np.float64).reshape(-1, 2)


def apply_transform(mset: MinutiaeSet, t: RigidTransform) -> MinutiaeSet:
    """Rotate every point about the pivot, then translate.

    Minutia directions are incremented by the rotation (mod 2*pi); the core
    point moves like any other point; source_id is preserved. The identity
    transform returns an equal set bit for bit.
    """
    if len(mset) == 0:
        raise EmptySet("cannot transform an empty minutiae set")
    r = t.rotation
    dx, dy = t.translation
    px, py = t.pivot

    if r == 0.0:
        # Pure translation: keep exact coordinates when dx = dy = 0.
        def move(x: float, y: float) -> tuple[float, float]:
            return x + dx, y + dy

        def turn(theta: float) -> float:
            return theta
    else:
        c, s = math.cos(r), math.sin(r)

        def move(x: float, y: float) -> tuple[float, float]:
            rx, ry = x - px, y - py
            return rx * c - ry * s + px + dx, rx * s + ry * c + py + dy

        def turn(theta: float) -> float:
            return wrap_angle(theta + r)

    moved = []
    for m in mset.minutiae:
        nx, ny = move(m.x, m.y)
        moved.append(replace(m, x=nx, y=ny, theta=turn(m.theta)))
    core = None
    if mset.core is not None:
        cx, cy = move(mset.core.x, mset.core.y)
        core = CorePoint(cx, cy)
    return MinutiaeSet(minutiae=moved, core=core, source_id=mset.source_id)


def to_core_relative(mset: MinutiaeSet) -> MinutiaeSet:
    """Translate the set so its core sits at the origin (core becomes (0, 0))."""
    if mset.core is None:
        raise MissingCore("set has no core point")
    moved = tuple(
        replace(m, x=m.x - mset.core.x, y=m.y - mset.core.y) for m in mset.minutiae
    )
    return MinutiaeSet(minutiae=moved, core=CorePoint(0.0, 0.0), source_id=mset.source_id)


_KIND_CODES = {k.value: k for k in MinutiaKind}


def parse_minutiae(data: bytes | str, source_id: str = "") -> MinutiaeSet:
    """Parse a MIN1 byte stream into a validated MinutiaeSet.

    Raises MalformedHeader, MalformedLine, DuplicatePoint or EmptySet.
    Minutiae keep their file order.
    """
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    lines = text.splitlines()
    if not lines or lines[0].strip() != "MIN1":
        raise MalformedHeader("expected 'MIN1' on line 1")

    core: CorePoint | None = None
    minutiae: list[Minutia] = []
    seen: set[tuple[float, float]] = set()

    for line_no, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if fields[0] == "CORE":
            if minutiae:
                raise MalformedLine(line_no, "CORE must precede all minutiae")
            if core is not None:
                raise MalformedLine(line_no, "duplicate CORE line")
            if len(fields) != 3:
                raise MalformedLine(line_no, "CORE takes exactly two coordinates")
            try:
                core = CorePoint(float(fields[1]), float(fields[2]))
            except ValueError as exc:
                raise MalformedLine(line_no, str(exc)) from exc
            continue
        if len(fields) != 4:
            raise MalformedLine(line_no, "expected '<x> <y> <theta> <E|B>'")
        kind = _KIND_CODES.get(fields[3])
        if kind is None:
            raise MalformedLine(line_no, f"unknown minutia kind {fields[3]!r}")
        try:
            m = Minutia(float(fields[0]), float(fields[1]), float(fields[2]), kind)
        except ValueError as exc:
            raise MalformedLine(line_no, str(exc)) from exc
        if (m.x, m.y) in seen:
            raise DuplicatePoint(line_no)
        seen.add((m.x, m.y))
        minutiae.append(m)

    if not minutiae:
        raise EmptySet("file contains no minutiae")
    return MinutiaeSet(minutiae=tuple(minutiae), core=core, source_id=source_id)


def serialize_minutiae(mset: MinutiaeSet, sig_digits: int = 9) -> bytes:
    """Serialize to MIN1 text. parse(serialize(s)) == s for 9-digit coordinates
    (pass sig_digits=17 for an exact float64 round trip).

    source_id is not part of the format; pass it back to parse_minutiae to
    round-trip it.
    """
    out = ["MIN1"]
    if mset.core is not None:
        out.append(f"CORE {fmt_real(mset.core.x, sig_digits)} {fmt_real(mset.core.y, sig_digits)}")
    for m in mset.minutiae:
        out.append(
            f"{fmt_real(m.x, sig_digits)} {fmt_real(m.y, sig_digits)} "
            f"{fmt_real(m.theta, sig_digits)} {m.kind.value}"
        )
    return ("\n".join(out) + "\n").encode("utf-8")


def load_minutiae(path) -> MinutiaeSet:
    """Read a MIN1 file; the file stem becomes the source_id."""
    from pathlib import Path

    p = Path(path)
    return parse_minutiae(p.read_bytes(), source_id=p.stem)


def save_minutiae(mset: MinutiaeSet, path) -> None:
    from pathlib import Path

    Path(path).write_bytes(serialize_minutiae(mset))
