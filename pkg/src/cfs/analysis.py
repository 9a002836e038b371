"""Closed-form displacement bounds and their empirical verification on traces.

Bound frame
-----------
Records store lateral quantities positive to each aircraft's right. The
bounds are stated for the southbound flow A with west (its right) positive.
The two flows are exchanged by reflection across the bisector of their
headings, which swaps right and left, so flow B's bound frame is positive
to its *left*. :func:`bound_sign` converts between the two.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .engine import SimulationTrace
from .scenario import FLOW_A, FLOW_B, FLOWS, ScenarioSpec, flow_geometry

#: Tolerance (nm) applied to every bound and separation check.
CHECK_TOL = 1e-6
DEFAULT_BIN_WIDTH = 0.5


class UndefinedBound(ValueError):
    pass


def eq1_bound(theta: float, sep: float) -> float:
    """Largest single maneuver for two zero-thickness flows crossing at ``theta``."""
    s = math.sin(theta / 2)
    if abs(s) < 1e-15:
        raise UndefinedBound("parallel flows (theta = 0 mod 2*pi) have no bound")
    return sep / abs(s)


def eq2_R_max(L0: float, sep: float) -> float:
    """Largest exit deviation on the bounded (west for flow A) side of the flow center."""
    return L0 + math.sqrt(2) * sep


def eq4_L_max(L0: float, sep: float) -> float:
    """Largest exit deviation on the unbounded (east for flow A) side of the flow center."""
    return 3 * L0 + math.sqrt(2) * sep


def eq3_per_aircraft_bound(R_max: float, start_position: float) -> float:
    """Symmetric displacement cap of one aircraft; ``start_position`` in the bound frame."""
    return R_max - start_position


def eq1_min_spacing(theta: float, sep: float) -> float:
    """In-trail spacing at which the other flow's conflict shadows stop overlapping.

    Below it, consecutive shadows form a continuous wall on the mover's offset
    axis and the single-maneuver bound no longer holds.
    """
    c = abs(math.cos(theta / 2))
    return math.inf if c < 1e-15 else 2 * sep / c


def bound_sign(flow: str) -> int:
    if flow == FLOW_A:
        return 1
    if flow == FLOW_B:
        return -1
    raise ValueError(f"unknown flow {flow!r}")


def right_max(spec: ScenarioSpec) -> float:
    """Bounded-side exit limit; reduces to the single-maneuver amplitude sep/|sin(theta/2)| for thin flows."""
    if math.isclose(spec.theta, math.pi / 2, abs_tol=1e-12):
        return eq2_R_max(spec.L0, spec.sep)
    return spec.L0 + eq1_bound(spec.theta, spec.sep)


def left_max(spec: ScenarioSpec) -> float:
    return right_max(spec) + 2 * spec.L0


@dataclass
class FlowMeasurement:
    count: int = 0
    max_abs_offset: float = 0.0
    max_exit_R_side: float = 0.0
    max_exit_L_side: float = 0.0
    max_intruder_count: int = 0


@dataclass
class BoundReport:
    kind: str
    theta: float
    L0: float
    sep: float
    eq1: float | None
    eq2_R_max: float
    eq4_L_max: float
    flows: dict[str, FlowMeasurement] = field(default_factory=dict)
    per_aircraft_eq3_violations: int = 0
    bound_violations: int = 0
    safety_violations: int = 0
    violating_ids: list[int] = field(default_factory=list)
    unsafe_pairs: list[tuple[int, int, float]] = field(default_factory=list)

    @property
    def max_offset(self) -> float:
        return max((m.max_abs_offset for m in self.flows.values()), default=0.0)

    @property
    def max_west_exit(self) -> float:
        return self.flows[FLOW_A].max_exit_R_side

    @property
    def max_east_exit(self) -> float:
        return self.flows[FLOW_A].max_exit_L_side

    @property
    def ok(self) -> bool:
        return not (self.per_aircraft_eq3_violations or self.bound_violations
                    or self.safety_violations)

    def as_dict(self) -> dict:
        """Plain data; floats carry the 9 significant digits of the text report."""
        d = _round_floats(asdict(self))
        d["unsafe_pairs"] = [list(p) for p in d["unsafe_pairs"]]
        return d

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        g = _fmt
        lines = [
            f"kind: {self.kind}",
            f"theta_deg: {g(math.degrees(self.theta))}",
            f"L0: {g(self.L0)}",
            f"sep: {g(self.sep)}",
            "analytic:",
            f"  eq1_d_max: {'none' if self.eq1 is None else g(self.eq1)}",
            f"  eq2_R_max: {g(self.eq2_R_max)}",
            f"  eq4_L_max: {g(self.eq4_L_max)}",
            "measured:",
            f"  max_offset: {g(self.max_offset)}",
        ]
        for flow, m in sorted(self.flows.items()):
            lines += [f"  flow_{flow}:",
                      f"    aircraft: {m.count}",
                      f"    max_abs_offset: {g(m.max_abs_offset)}",
                      f"    max_exit_R_side: {g(m.max_exit_R_side)}",
                      f"    max_exit_L_side: {g(m.max_exit_L_side)}",
                      f"    max_intruder_count: {m.max_intruder_count}"]
        lines += [
            "violations:",
            f"  per_aircraft_eq3: {self.per_aircraft_eq3_violations}",
            f"  flow_bound: {self.bound_violations}",
            f"  safety: {self.safety_violations}",
            f"  aircraft: {' '.join(map(str, self.violating_ids)) or 'none'}",
            f"status: {'ok' if self.ok else 'VIOLATED'}",
        ]
        return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _round_floats(obj):
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return type(obj)(_round_floats(v) for v in obj)
    return obj


def trace_arrays(trace: SimulationTrace) -> dict[str, np.ndarray]:
    """Post-maneuver trajectories of all records as flat arrays."""
    spec = trace.spec
    n = len(trace.records)
    px, py, vx, vy = (np.empty(n) for _ in range(4))
    geos = {f: flow_geometry(spec, f) for f in FLOWS}
    for k, r in enumerate(trace.records):
        geo = geos[r.flow]
        p = geo.gate_point(r.start_position) + geo.lateral * r.offset
        px[k], py[k] = p.x, p.y
        vx[k], vy[k] = geo.heading.x * spec.speed, geo.heading.y * spec.speed
    t = np.array([r.entry_time for r in trace.records], dtype=float)
    ids = np.array([r.id for r in trace.records], dtype=np.int64)
    return {"px": px, "py": py, "vx": vx, "vy": vy, "t": t, "id": ids}


def _transit(a: dict, spec: ScenarioSpec) -> tuple[np.ndarray, np.ndarray]:
    c, radius = spec.area.center, spec.area.radius
    qx, qy = a["px"] - c.x, a["py"] - c.y
    vv = a["vx"] ** 2 + a["vy"] ** 2
    b = qx * a["vx"] + qy * a["vy"]
    disc = b * b - vv * (qx * qx + qy * qy - radius * radius)
    miss = disc < 0
    root = np.sqrt(np.where(miss, 0.0, disc))
    t_in = a["t"] + (-b - root) / vv
    t_out = a["t"] + (-b + root) / vv
    t_in = np.maximum(t_in, a["t"])
    t_in[miss] = np.inf
    t_out[miss] = -np.inf
    return t_in, t_out


def pairwise_min_separation(trace: SimulationTrace) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Closest approach of every pair of aircraft that share the control area.

    Candidate pairs are those whose entry-to-exit occupancy intervals overlap.
    The minimum is taken over the trace's conflict horizon in closed form.
    Returns ``(i, j, distance)`` with record indices.
    """
    spec = trace.spec
    a = trace_arrays(trace)
    n = len(a["t"])
    if n < 2:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, np.zeros(0)
    t_in, t_out = _transit(a, spec)
    leave = np.maximum(t_out, a["t"])
    order = np.argsort(a["t"], kind="stable")
    ts = a["t"][order]
    stop = np.searchsorted(ts, leave[order], side="left")
    starts = np.arange(1, n + 1)
    counts = np.maximum(stop - starts, 0)
    ii = np.repeat(order, counts)
    first = np.repeat(starts - (np.cumsum(counts) - counts), counts)
    jj = order[first + np.arange(counts.sum())]
    lo = np.maximum(a["t"][ii], a["t"][jj])
    if spec.horizon == "windowed":
        lo = np.maximum(lo, np.maximum(t_in[ii], t_in[jj]))
        hi = np.minimum(t_out[ii], t_out[jj])
    else:
        hi = np.full(lo.shape, np.inf)
    keep = lo <= hi
    ii, jj, lo, hi = ii[keep], jj[keep], lo[keep], hi[keep]
    dx = (a["px"][ii] + a["vx"][ii] * (lo - a["t"][ii])) - (a["px"][jj] + a["vx"][jj] * (lo - a["t"][jj]))
    dy = (a["py"][ii] + a["vy"][ii] * (lo - a["t"][ii])) - (a["py"][jj] + a["vy"][jj] * (lo - a["t"][jj]))
    dvx = a["vx"][ii] - a["vx"][jj]
    dvy = a["vy"][ii] - a["vy"][jj]
    vv = dvx * dvx + dvy * dvy
    with np.errstate(invalid="ignore", divide="ignore"):
        tau = np.where(vv > 0, -(dx * dvx + dy * dvy) / np.where(vv > 0, vv, 1.0), 0.0)
    tau = np.clip(tau, 0.0, hi - lo)
    dist = np.hypot(dx + dvx * tau, dy + dvy * tau)
    return ii, jj, dist


def verify_trace(trace: SimulationTrace, tol: float = CHECK_TOL) -> BoundReport:
    """Check pairwise safety, per-aircraft and flow-level bounds of a completed trace."""
    spec = trace.spec
    thin = spec.L0 == 0
    R, L = right_max(spec), left_max(spec)
    report = BoundReport(spec.kind, spec.theta, spec.L0, spec.sep,
                         eq1_bound(spec.theta, spec.sep) if thin else None,
                         eq2_R_max(spec.L0, spec.sep), eq4_L_max(spec.L0, spec.sep))
    bad: set[int] = set()
    for flow in FLOWS:
        sgn = bound_sign(flow)
        m = FlowMeasurement()
        for r in trace.records:
            if r.flow != flow:
                continue
            m.count += 1
            off = abs(r.offset)
            exit_b = sgn * r.exit_lateral
            m.max_abs_offset = max(m.max_abs_offset, off)
            m.max_exit_R_side = max(m.max_exit_R_side, exit_b)
            m.max_exit_L_side = max(m.max_exit_L_side, -exit_b)
            m.max_intruder_count = max(m.max_intruder_count, r.intruder_count)
            if off > eq3_per_aircraft_bound(R, sgn * r.start_position) + tol:
                report.per_aircraft_eq3_violations += 1
                bad.add(r.id)
            if exit_b > R + tol or -exit_b > L + tol or (thin and off > R + tol):
                report.bound_violations += 1
                bad.add(r.id)
        report.flows[flow] = m
    ii, jj, dist = pairwise_min_separation(trace)
    unsafe = dist < spec.sep - tol
    report.safety_violations = int(unsafe.sum())
    for i, j, d in zip(ii[unsafe], jj[unsafe], dist[unsafe]):
        a, b = trace.records[i].id, trace.records[j].id
        report.unsafe_pairs.append((min(a, b), max(a, b), float(d)))
        bad.update((a, b))
    report.unsafe_pairs.sort()
    report.violating_ids = sorted(bad)
    return report


@dataclass
class Histogram:
    bin_edges: np.ndarray
    counts: np.ndarray
    total: int

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def support(self) -> tuple[float, float]:
        """Edges of the outermost occupied bins; ``(0, 0)`` when empty."""
        nz = np.flatnonzero(self.counts)
        if nz.size == 0:
            return 0.0, 0.0
        return float(self.bin_edges[nz[0]]), float(self.bin_edges[nz[-1] + 1])

    def to_csv(self, header: dict | None = None) -> str:
        lines = [f"# {k}: {v}" for k, v in (header or {}).items()]
        lines.append("bin_center,count")
        lines += [f"{c:.9g},{int(n)}" for c, n in zip(self.centers, self.counts)]
        return "\n".join(lines) + "\n"


def lateral_values(trace: SimulationTrace, flow: str, use_start_positions: bool) -> np.ndarray:
    """Start or exit lateral positions of one flow, in the bound frame."""
    sgn = bound_sign(flow)
    return np.array([sgn * (r.start_position if use_start_positions else r.exit_lateral)
                     for r in trace.records if r.flow == flow], dtype=float)


def exit_distribution(trace: SimulationTrace, flow: str, bin_width: float = DEFAULT_BIN_WIDTH,
                      use_start_positions: bool = False) -> Histogram:
    """Histogram of lateral positions spanning ``[-L_max, R_max]`` in whole bins.

    The range widens to cover any data outside the analytic bounds so that
    the counts always sum to the number of aircraft.
    """
    if not bin_width > 0:
        raise ValueError(f"bin_width must be positive, got {bin_width}")
    values = lateral_values(trace, flow, use_start_positions)
    lo, hi = -left_max(trace.spec), right_max(trace.spec)
    if values.size:
        lo, hi = min(lo, values.min()), max(hi, values.max())
    k_lo = math.floor(lo / bin_width)
    k_hi = math.ceil(hi / bin_width)
    if k_hi == k_lo:
        k_hi += 1
    edges = np.arange(k_lo, k_hi + 1) * bin_width
    counts, _ = np.histogram(values, bins=edges)
    return Histogram(edges, counts, int(values.size))
