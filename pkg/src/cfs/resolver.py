"""Least-displacement lateral offset selection against every aircraft in the area."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import _core
from .kinematics import AircraftState, ControlArea, TimeInterval, transit_window

HORIZONS = ("windowed", "unbounded")

#: Samples per analytic interval when refining against the control-area window.
DEFAULT_SAMPLES = 24
_DENSE_FACTOR = 64


class InvalidParameter(ValueError):
    pass


class Infeasible(RuntimeError):
    """No conflict-free offset within the configured cap."""

    def __init__(self, message, aircraft_id=None):
        super().__init__(message)
        self.aircraft_id = aircraft_id


@dataclass(frozen=True)
class ForbiddenSet:
    """Union of disjoint open intervals of lateral offsets, sorted by lower bound."""

    intervals: tuple[tuple[float, float], ...] = ()

    @classmethod
    def from_intervals(cls, intervals: Iterable[tuple[float, float]]) -> ForbiddenSet:
        """Normalize: drop empty intervals, then merge overlapping or adjacent ones."""
        merged: list[list[float]] = []
        for lo, hi in sorted((lo, hi) for lo, hi in intervals if lo < hi):
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return cls(tuple((lo, hi) for lo, hi in merged))

    def union(self, other: ForbiddenSet) -> ForbiddenSet:
        return ForbiddenSet.from_intervals(self.intervals + other.intervals)

    def contains(self, x: float) -> bool:
        return any(lo < x < hi for lo, hi in self.intervals)

    def __bool__(self):
        return bool(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)


EMPTY = ForbiddenSet()


@dataclass(frozen=True)
class ResolvedManeuver:
    offset: float
    intruders_considered: int = 0
    binding_intruder: int | None = None


@dataclass(frozen=True)
class ResolverConfig:
    sep: float = 5.0
    area: ControlArea = field(default_factory=ControlArea)
    horizon: str = "windowed"
    max_offset: float = 100.0
    samples: int = DEFAULT_SAMPLES

    def __post_init__(self):
        if not self.sep > 0:
            raise InvalidParameter(f"sep must be positive, got {self.sep}")
        if not self.max_offset > 0:
            raise InvalidParameter(f"max_offset must be positive, got {self.max_offset}")
        if self.horizon not in HORIZONS:
            raise InvalidParameter(f"horizon must be one of {HORIZONS}, got {self.horizon!r}")


def mover_tuple(mover: AircraftState) -> tuple:
    n, v, lat = mover.nominal_entry, mover.vel, mover.lateral
    return (n.x, n.y, v.x, v.y, mover.ref_time, lat.x, lat.y)


def intruder_row(intruder: AircraftState, area: ControlArea, horizon: str) -> tuple:
    window = TimeInterval.unbounded(intruder.ref_time)
    if horizon == "windowed":
        window = window.intersect(transit_window(intruder, area))
    p, v = intruder.pos0, intruder.vel
    return (p.x, p.y, v.x, v.y, intruder.ref_time, window.t_start, window.t_end)


def _check(mover: AircraftState, sep: float, horizon: str):
    if not sep > 0:
        raise InvalidParameter(f"sep must be positive, got {sep}")
    if horizon not in HORIZONS:
        raise InvalidParameter(f"horizon must be one of {HORIZONS}, got {horizon!r}")
    if mover.offset != 0.0:
        raise InvalidParameter("mover must be in its nominal (zero-offset) state")


def _raw(mover, rows, sep, area, horizon, samples):
    c = area.center
    return _core.forbidden_raw(mover_tuple(mover), rows, float(sep), c.x, c.y, area.radius,
                               horizon == "windowed", int(samples))


def forbidden_interval(mover: AircraftState, intruder: AircraftState, sep: float,
                       horizon: str = "windowed", area: ControlArea | None = None,
                       samples: int = DEFAULT_SAMPLES) -> ForbiddenSet:
    """Offsets that would bring ``mover`` closer than ``sep`` to ``intruder``."""
    return forbidden_set(mover, [intruder], sep, horizon, area, samples)


def forbidden_set(mover: AircraftState, intruders: Sequence[AircraftState], sep: float,
                  horizon: str = "windowed", area: ControlArea | None = None,
                  samples: int = DEFAULT_SAMPLES) -> ForbiddenSet:
    _check(mover, sep, horizon)
    area = area or ControlArea()
    rows = [intruder_row(i, area, horizon) for i in intruders]
    return ForbiddenSet.from_intervals((lo, hi) for lo, hi, _ in _raw(mover, rows, sep, area,
                                                                      horizon, samples))


def optimal_offset(f: ForbiddenSet, max_offset: float = 100.0) -> ResolvedManeuver:
    """Smallest-magnitude offset outside ``f``; ties go to the positive (right) side."""
    if not max_offset > 0:
        raise InvalidParameter(f"max_offset must be positive, got {max_offset}")
    offset = _choose(f.intervals, max_offset)
    return ResolvedManeuver(offset)


def _choose(intervals, max_offset):
    for lo, hi in intervals:
        if lo < 0.0 < hi:
            # endpoints of a merged open interval are never inside another one
            right, left = hi, lo
            break
    else:
        return 0.0
    if right <= -left:
        best = right
    else:
        best = left
    if abs(best) > max_offset:
        other = left if best == right else right
        if abs(other) <= max_offset:
            return other
        raise Infeasible(f"no conflict-free offset within {max_offset} nm "
                         f"(nearest free offsets {left:.6g}, {right:.6g})")
    if math.isinf(best):
        raise Infeasible("forbidden set is unbounded on both sides")
    return best


def offset_to_heading(d: float, D: float) -> float:
    """Heading change that reaches lateral displacement ``d`` after ``D`` nm of travel."""
    if not D > 0:
        raise InvalidParameter(f"distance to conflict must be positive, got {D}")
    return math.atan(d / D)


def resolve(mover: AircraftState, snapshot: Sequence[AircraftState],
            config: ResolverConfig | None = None) -> ResolvedManeuver:
    """Pick the least-displacement offset for ``mover`` against ``snapshot``.

    The choice is re-checked against every intruder with the exact conflict
    predicate; an intruder whose thin forbidden band was missed by the
    sampled windowed refinement is recomputed densely.
    """
    config = config or ResolverConfig()
    _check(mover, config.sep, config.horizon)
    rows = [intruder_row(i, config.area, config.horizon) for i in snapshot]
    return resolve_rows(mover, rows, [i.id for i in snapshot], config)


def resolve_rows(mover: AircraftState, rows: list, ids: Sequence[int],
                 config: ResolverConfig) -> ResolvedManeuver:
    area, sep, horizon = config.area, config.sep, config.horizon
    c = area.center
    mv = mover_tuple(mover)
    windowed = horizon == "windowed"
    raw = _core.forbidden_raw(mv, rows, sep, c.x, c.y, area.radius, windowed, config.samples)
    dense: set[int] = set()
    while True:
        f = ForbiddenSet.from_intervals((lo, hi) for lo, hi, _ in raw)
        try:
            x = _choose(f.intervals, config.max_offset)
        except Infeasible as exc:
            raise Infeasible(f"aircraft {mover.id}: {exc}", mover.id) from None
        if not rows:
            break
        missed = [i for i in _core.conflicting_rows(mv, rows, x, sep, c.x, c.y, area.radius,
                                                    windowed) if i not in dense]
        if not missed:
            break
        for i in missed:
            dense.add(i)
            raw = [r for r in raw if r[2] != i]
            raw += [(lo, hi, i) for lo, hi, _ in
                    _core.forbidden_raw(mv, [rows[i]], sep, c.x, c.y, area.radius, windowed,
                                        config.samples * _DENSE_FACTOR)]
    binding = None
    if x != 0.0:
        for lo, hi, i in raw:
            if lo == x or hi == x:
                binding = ids[i]
                break
    return ResolvedManeuver(x, len(rows), binding)
