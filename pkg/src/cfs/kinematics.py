"""Constant-velocity trajectory geometry in the horizontal plane.

Units are nautical miles and minutes. Positions are east/north.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

#: Absolute tolerance used when comparing distances against a separation minimum.
SEP_TOL = 1e-9


class NoCopresence(ValueError):
    """Raised when two aircraft never share a time window."""


@dataclass(frozen=True, slots=True)
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

    def __mul__(self, k: float) -> Vec2:
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __neg__(self) -> Vec2:
        return Vec2(-self.x, -self.y)

    def __iter__(self):
        yield self.x
        yield self.y

    def dot(self, other: Vec2) -> float:
        return self.x * other.x + self.y * other.y

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def unit(self) -> Vec2:
        n = self.norm()
        if n == 0.0:
            raise ValueError("zero vector has no direction")
        return Vec2(self.x / n, self.y / n)

    def right_normal(self) -> Vec2:
        """The vector rotated by -90 degrees."""
        return Vec2(self.y, -self.x)


def lateral_unit(vel: Vec2) -> Vec2:
    """Unit vector pointing to the right of the direction of travel."""
    return vel.right_normal().unit()


@dataclass(frozen=True, slots=True)
class TimeInterval:
    """Closed interval of times. ``TimeInterval.empty()`` is the canonical empty one."""

    t_start: float
    t_end: float

    @classmethod
    def empty(cls) -> TimeInterval:
        return cls(math.inf, -math.inf)

    @classmethod
    def unbounded(cls, t_start: float) -> TimeInterval:
        return cls(t_start, math.inf)

    @property
    def is_empty(self) -> bool:
        return not self.t_start <= self.t_end

    def contains(self, t: float) -> bool:
        return self.t_start <= t <= self.t_end

    def intersect(self, other: TimeInterval) -> TimeInterval:
        lo = max(self.t_start, other.t_start)
        hi = min(self.t_end, other.t_end)
        if lo > hi:
            return TimeInterval.empty()
        return TimeInterval(lo, hi)


@dataclass(frozen=True, slots=True)
class ControlArea:
    center: Vec2 = Vec2(0.0, 0.0)
    radius: float = 100.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"control-area radius must be positive, got {self.radius}")


@dataclass(frozen=True, slots=True)
class AircraftState:
    """An aircraft flying a straight line at constant velocity.

    ``pos0`` is the position at ``ref_time`` and already includes the lateral
    ``offset`` applied to ``nominal_entry``.
    """

    id: int
    flow: str
    pos0: Vec2
    vel: Vec2
    ref_time: float = 0.0
    nominal_entry: Vec2 | None = None
    offset: float = 0.0
    start_position: float = 0.0
    lateral: Vec2 = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.vel.norm() <= 0.0:
            raise ValueError("aircraft velocity must be non-zero")
        object.__setattr__(self, "lateral", lateral_unit(self.vel))
        if self.nominal_entry is None:
            object.__setattr__(self, "nominal_entry", self.pos0 - self.lateral * self.offset)

    @classmethod
    def at_entry(cls, id, flow, nominal_entry, vel, ref_time=0.0, offset=0.0, start_position=0.0):
        lat = lateral_unit(vel)
        return cls(id, flow, nominal_entry + lat * offset, vel, ref_time,
                   nominal_entry, offset, start_position)

    def shifted(self, offset: float) -> AircraftState:
        """Same aircraft with its entry point moved ``offset`` nm to its right."""
        return replace(self, pos0=self.nominal_entry + self.lateral * offset, offset=offset)


def position_at(state: AircraftState, t: float) -> Vec2:
    if not math.isfinite(t):
        raise ValueError(f"time must be finite, got {t}")
    dt = t - state.ref_time
    return Vec2(state.pos0.x + state.vel.x * dt, state.pos0.y + state.vel.y * dt)


def min_separation(a: AircraftState, b: AircraftState, window: TimeInterval) -> tuple[float, float]:
    """Minimum distance between ``a`` and ``b`` over ``window`` and a time achieving it."""
    if window.is_empty:
        raise NoCopresence("aircraft are never co-present")
    t0 = window.t_start
    pa, pb = position_at(a, t0), position_at(b, t0)
    dpx, dpy = pa.x - pb.x, pa.y - pb.y
    dvx, dvy = a.vel.x - b.vel.x, a.vel.y - b.vel.y
    vv = dvx * dvx + dvy * dvy
    if vv == 0.0:
        return math.hypot(dpx, dpy), t0
    tau = -(dpx * dvx + dpy * dvy) / vv
    tau = min(max(tau, 0.0), window.t_end - t0)
    return math.hypot(dpx + dvx * tau, dpy + dvy * tau), t0 + tau


def transit_window(state: AircraftState, area: ControlArea) -> TimeInterval:
    """Times at which ``state`` is inside or on the control-area circle."""
    px = state.pos0.x - area.center.x
    py = state.pos0.y - area.center.y
    vx, vy = state.vel.x, state.vel.y
    a = vx * vx + vy * vy
    if a == 0.0:
        raise ValueError("aircraft velocity must be non-zero")
    b = px * vx + py * vy
    c = px * px + py * py - area.radius * area.radius
    disc = b * b - a * c
    if disc < 0.0:
        return TimeInterval.empty()
    root = math.sqrt(disc)
    # numerically stable pair of roots
    q = -(b + math.copysign(root, b))
    if q == 0.0:
        t1 = t2 = 0.0
    else:
        t1, t2 = q / a, c / q
    lo, hi = min(t1, t2), max(t1, t2)
    return TimeInterval(state.ref_time + lo, state.ref_time + hi)


def copresence_window(a: AircraftState, b: AircraftState, area: ControlArea,
                      horizon: str = "windowed") -> TimeInterval:
    """Window over which a conflict between ``a`` and ``b`` counts.

    ``windowed``: both aircraft exist and are inside the control area.
    ``unbounded``: from the later of the two reference times onward.
    """
    start = TimeInterval.unbounded(max(a.ref_time, b.ref_time))
    if horizon == "unbounded":
        return start
    if horizon != "windowed":
        raise ValueError(f"unknown horizon mode {horizon!r}")
    return start.intersect(transit_window(a, area)).intersect(transit_window(b, area))


def in_conflict(a: AircraftState, b: AircraftState, sep: float, area: ControlArea,
                horizon: str = "windowed") -> bool:
    window = copresence_window(a, b, area, horizon)
    if window.is_empty:
        return False
    return min_separation(a, b, window)[0] < sep - SEP_TOL
