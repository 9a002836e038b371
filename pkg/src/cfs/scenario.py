"""Seeded two-flow traffic streams: orthogonal, arbitrary angle and pseudo-random."""

from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .kinematics import ControlArea, Vec2, lateral_unit

KINDS = ("orthogonal", "angle", "pseudo_random")
FLOW_A = "A"
FLOW_B = "B"
FLOWS = (FLOW_A, FLOW_B)
GENERATOR = "numpy.PCG64(SeedSequence([seed, flow]))"
_FLOW_INDEX = {FLOW_A: 0, FLOW_B: 1}


class InvalidScenario(ValueError):
    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


class Unsupported(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioSpec:
    """Everything that determines a run.

    ``theta`` is the encounter angle in radians, counter-clockwise from the
    southbound flow A to flow B. ``L0`` is the flow half-thickness (entry gate
    spans ``2 * L0``). ``gate_distance_a/b`` place each entry gate along its
    flow centerline, measured from the centerline intersection at the area
    center; ``None`` means the area radius.
    """

    kind: str = "orthogonal"
    theta: float = math.pi / 2
    L0: float = 0.0
    sep: float = 5.0
    area: ControlArea = field(default_factory=ControlArea)
    speed: float = 8.0
    arrival_period: float = 2.5
    phase: float = 0.0
    seed: int = 0
    n_aircraft: int = 1000
    horizon: str = "windowed"
    max_offset: float = 100.0
    gate_distance_a: float | None = None
    gate_distance_b: float | None = None
    distribution: str = "uniform"

    def __post_init__(self):
        # numbers are stored as floats so that equal specs serialize identically
        for name in ("theta", "L0", "sep", "speed", "arrival_period", "phase", "max_offset",
                     "gate_distance_a", "gate_distance_b"):
            value = getattr(self, name)
            if isinstance(value, (int, float)) and not isinstance(value, bool):
                object.__setattr__(self, name, float(value))
        validate(self)

    def replace(self, **changes) -> ScenarioSpec:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d.update(changes)
        return ScenarioSpec(**d)

    @property
    def dist_a(self) -> float:
        return self.area.radius if self.gate_distance_a is None else self.gate_distance_a

    @property
    def dist_b(self) -> float:
        return self.area.radius if self.gate_distance_b is None else self.gate_distance_b

    def as_dict(self) -> dict:
        d = asdict(self)
        d["area"] = {"center_x": self.area.center.x, "center_y": self.area.center.y,
                     "radius": self.area.radius}
        return d

    def digest(self) -> str:
        text = repr(sorted(self.as_dict().items()))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def validate(spec: ScenarioSpec) -> None:
    if spec.kind not in KINDS:
        raise InvalidScenario("kind", f"must be one of {KINDS}, got {spec.kind!r}")
    if not (math.isfinite(spec.sep) and spec.sep > 0):
        raise InvalidScenario("sep", f"must be positive, got {spec.sep}")
    if not (math.isfinite(spec.L0) and spec.L0 >= 0):
        raise InvalidScenario("L0", f"must be non-negative, got {spec.L0}")
    if not (0 < spec.theta < 2 * math.pi):
        raise InvalidScenario("theta", f"must lie in (0, 2*pi), got {spec.theta}")
    if not (math.isfinite(spec.speed) and spec.speed > 0):
        raise InvalidScenario("speed", f"must be positive, got {spec.speed}")
    if not spec.arrival_period > 0:
        raise InvalidScenario("arrival_period", f"must be positive, got {spec.arrival_period}")
    if spec.arrival_period * spec.speed < spec.sep:
        raise InvalidScenario("arrival_period",
                              f"spacing {spec.arrival_period * spec.speed} nm is below "
                              f"sep {spec.sep} nm")
    if not math.isfinite(spec.phase):
        raise InvalidScenario("phase", "must be finite")
    if spec.n_aircraft < 0:
        raise InvalidScenario("n_aircraft", f"must be non-negative, got {spec.n_aircraft}")
    if not 0 <= spec.seed < 2**64:
        raise InvalidScenario("seed", "must be a 64-bit unsigned integer")
    if spec.horizon not in ("windowed", "unbounded"):
        raise InvalidScenario("horizon", f"must be windowed or unbounded, got {spec.horizon!r}")
    if not spec.max_offset > 0:
        raise InvalidScenario("max_offset", f"must be positive, got {spec.max_offset}")
    if spec.distribution != "uniform":
        raise InvalidScenario("distribution", f"only 'uniform' is supported, got "
                                              f"{spec.distribution!r}")
    for key in ("gate_distance_a", "gate_distance_b"):
        value = getattr(spec, key)
        if value is not None and not value > 0:
            raise InvalidScenario(key, f"must be positive, got {value}")
    if spec.kind == "orthogonal" and not math.isclose(spec.theta, math.pi / 2, abs_tol=1e-12):
        raise InvalidScenario("theta", "orthogonal geometry requires theta = 90 degrees")
    if spec.kind in ("orthogonal", "angle") and spec.L0 != 0:
        raise InvalidScenario("L0", f"{spec.kind} geometry has zero thickness")


@dataclass(frozen=True, slots=True)
class AircraftEntry:
    entry_time: float
    flow: str
    index: int
    nominal_entry: Vec2
    vel: Vec2
    start_position: float


@dataclass(frozen=True)
class FlowGeometry:
    """Heading, lateral axis and gate center of one flow."""

    heading: Vec2
    lateral: Vec2
    gate_center: Vec2

    def gate_point(self, start_position: float) -> Vec2:
        return self.gate_center + self.lateral * start_position

    def lateral_coordinate(self, p: Vec2, center: Vec2) -> float:
        """Signed distance of ``p`` from the flow centerline, positive to the right."""
        return (p - center).dot(self.lateral)


def flow_geometry(spec: ScenarioSpec, flow: str) -> FlowGeometry:
    if flow == FLOW_A:
        heading, dist = Vec2(0.0, -1.0), spec.dist_a
    elif flow == FLOW_B:
        heading, dist = _rotated_south(spec.theta), spec.dist_b
    else:
        raise ValueError(f"unknown flow {flow!r}")
    return FlowGeometry(heading, lateral_unit(heading),
                        spec.area.center - heading * dist)


def _rotated_south(theta: float) -> Vec2:
    # snap round-off so that e.g. 90 degrees gives exactly (1, 0)
    x, y = math.sin(theta), -math.cos(theta)
    return Vec2(0.0 if abs(x) < 1e-15 else x, 0.0 if abs(y) < 1e-15 else y)


def start_positions(spec: ScenarioSpec, flow: str) -> np.ndarray:
    """Gate draws for one flow; entry ``k`` gets the ``k``-th draw of its own stream."""
    if spec.kind != "pseudo_random" or spec.L0 == 0:
        return np.zeros(spec.n_aircraft)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([spec.seed,
                                                                      _FLOW_INDEX[flow]])))
    return rng.uniform(-spec.L0, spec.L0, size=spec.n_aircraft)


def make_scenario(spec: ScenarioSpec) -> list[AircraftEntry]:
    """Time-ordered entries of both flows; simultaneous entries put flow A first."""
    validate(spec)
    entries = []
    for flow, t_first in ((FLOW_A, 0.0), (FLOW_B, spec.phase)):
        geo = flow_geometry(spec, flow)
        vel = geo.heading * spec.speed
        for k, sp in enumerate(start_positions(spec, flow).tolist()):
            entries.append(AircraftEntry(t_first + k * spec.arrival_period, flow, k,
                                         geo.gate_point(sp), vel, sp))
    entries.sort(key=lambda e: (e.entry_time, _FLOW_INDEX[e.flow], e.index))
    return entries


def arrival_phase(dist_a: float, dist_b: float, speed: float) -> float:
    """Delay of flow B that makes paired entrants reach the crossing together."""
    return (dist_a - dist_b) / speed


def worst_case_phase(spec: ScenarioSpec) -> float:
    if spec.kind == "pseudo_random":
        raise Unsupported("pseudo-random flows have no single worst-case phase; sweep phase")
    return arrival_phase(spec.dist_a, spec.dist_b, spec.speed)
