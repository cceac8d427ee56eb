"""
Planar vector math and straight-line path prediction.

Everything here is a pure function over immutable values, so it is safe to
call from any thread.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional


class UndefinedDirectionError(ValueError):
    """Raised when a direction is requested from a zero-length vector."""


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite vector component: ({self.x}, {self.y})")

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> Vec2:
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def dot(self, other: Vec2) -> float:
        return self.x * other.x + self.y * other.y

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def __iter__(self):
        yield self.x
        yield self.y


ORIGIN = Vec2(0.0, 0.0)


def distance(a: Vec2, b: Vec2) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def angle_between(v1: Vec2, v2: Vec2) -> float:
    """Unsigned angle in radians, in [0, pi], between two non-zero vectors."""
    n1, n2 = v1.norm(), v2.norm()
    if n1 == 0.0 or n2 == 0.0:
        raise UndefinedDirectionError("angle of a zero-length vector is undefined")
    c = v1.dot(v2) / (n1 * n2)
    return math.acos(max(-1.0, min(1.0, c)))


def advance_toward(pos: Vec2, goal: Vec2, step: float) -> Vec2:
    """Move ``pos`` at most ``step`` meters along the straight line to ``goal``."""
    if step < 0:
        raise ValueError(f"step must be >= 0, got {step}")
    d = distance(pos, goal)
    if d <= step:
        return goal
    return pos + (goal - pos) * (step / d)


@dataclass(frozen=True)
class Path:
    """Positions sampled every ``dt`` seconds; index k is the position after k steps."""

    points: tuple[Vec2, ...]
    dt: float

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not self.points:
            raise ValueError("a path needs at least one point")

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, i: int) -> Vec2:
        return self.points[i]

    def at(self, i: int) -> Vec2:
        # agents rest at their last point once a path runs out
        return self.points[min(i, len(self.points) - 1)]

    @property
    def final(self) -> Vec2:
        return self.points[-1]


def extrapolate(pos: Vec2, goal: Optional[Vec2], speed: float, dt: float, horizon: int) -> Path:
    """Straight-line, constant-speed path of ``horizon`` steps (``horizon + 1`` points).

    Each point is measured from ``pos`` rather than accumulated step by step,
    so arrival happens exactly at step ``ceil(d / (speed * dt))``.
    """
    if speed < 0:
        raise ValueError(f"speed must be >= 0, got {speed}")
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if goal is None:
        return Path((pos,) * (horizon + 1), dt)
    step = speed * dt
    points = [advance_toward(pos, goal, k * step) for k in range(horizon + 1)]
    return Path(tuple(points), dt)


class Conflict(NamedTuple):
    step: int
    a: Vec2
    b: Vec2


def first_conflict(pa: Path, pb: Path, threshold: float) -> Optional[Conflict]:
    """Earliest step where the two paths come closer than ``threshold``.

    The returned positions are the ones held one step before the violation,
    i.e. where both agents would stop. A violation at step 0 returns the
    step-0 positions.
    """
    if threshold <= 0:
        raise ValueError(f"threshold must be > 0, got {threshold}")
    if not math.isclose(pa.dt, pb.dt):
        raise ValueError(f"paths do not share dt: {pa.dt} vs {pb.dt}")
    for i in range(max(len(pa), len(pb))):
        if distance(pa.at(i), pb.at(i)) < threshold:
            j = max(i - 1, 0)
            return Conflict(i, pa.at(j), pb.at(j))
    return None

