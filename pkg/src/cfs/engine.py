"""Event-driven sequential resolution over a scenario's entry stream."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import _core
from .kinematics import AircraftState, transit_window
from .resolver import Infeasible, ResolverConfig, intruder_row, resolve_rows
from .scenario import GENERATOR, ScenarioSpec, flow_geometry, make_scenario


@dataclass(frozen=True, slots=True)
class AircraftRecord:
    id: int
    flow: str
    entry_time: float
    start_position: float
    offset: float
    exit_lateral: float
    intruder_count: int
    binding_intruder: int | None


@dataclass
class SimulationTrace:
    spec: ScenarioSpec
    records: list[AircraftRecord] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def flow_records(self, flow: str) -> list[AircraftRecord]:
        return [r for r in self.records if r.flow == flow]


class Unstable(Infeasible):
    """Resolution failed mid-run; ``trace`` holds every record committed so far."""

    def __init__(self, message, aircraft_id, trace):
        super().__init__(message, aircraft_id)
        self.trace = trace


def trace_metadata(spec: ScenarioSpec) -> dict:
    from . import __version__

    return {"seed": spec.seed, "generator": GENERATOR, "horizon": spec.horizon,
            "spec_hash": spec.digest(), "version": __version__}


def resolver_config(spec: ScenarioSpec) -> ResolverConfig:
    return ResolverConfig(sep=spec.sep, area=spec.area, horizon=spec.horizon,
                          max_offset=spec.max_offset)


def record_state(spec: ScenarioSpec, record: AircraftRecord) -> AircraftState:
    """Post-maneuver trajectory of a recorded aircraft."""
    geo = flow_geometry(spec, record.flow)
    return AircraftState.at_entry(record.id, record.flow, geo.gate_point(record.start_position),
                                  geo.heading * spec.speed, record.entry_time, record.offset,
                                  record.start_position)


def exit_time(state: AircraftState, spec: ScenarioSpec) -> float:
    """Time the aircraft leaves the control area; its entry time if it never enters."""
    window = transit_window(state, spec.area)
    if window.is_empty or window.t_end < state.ref_time:
        return state.ref_time
    return window.t_end


def run(spec: ScenarioSpec) -> SimulationTrace:
    """Resolve every entrant once, in entry order, against the aircraft in the area."""
    config = resolver_config(spec)
    trace = SimulationTrace(spec, [], trace_metadata(spec))
    trace.metadata["backend"] = _core.BACKEND
    # (exit time, id, kernel row) of aircraft still in the area
    active: list[tuple[float, int, tuple]] = []
    for aid, entry in enumerate(make_scenario(spec)):
        t = entry.entry_time
        active = [a for a in active if a[0] > t]
        mover = AircraftState.at_entry(aid, entry.flow, entry.nominal_entry, entry.vel, t,
                                       0.0, entry.start_position)
        try:
            m = resolve_rows(mover, [a[2] for a in active], [a[1] for a in active], config)
        except Infeasible as exc:
            raise Unstable(f"instability at aircraft {aid} (flow {entry.flow}, t={t:g}): {exc}",
                           aid, trace) from None
        final = mover.shifted(m.offset)
        trace.records.append(AircraftRecord(aid, entry.flow, t, entry.start_position, m.offset,
                                            entry.start_position + m.offset,
                                            m.intruders_considered, m.binding_intruder))
        active.append((exit_time(final, spec), aid,
                       intruder_row(final, spec.area, spec.horizon)))
    return trace


def snapshot_at(trace: SimulationTrace, t: float) -> list[AircraftState]:
    """Aircraft of ``trace`` with entry time <= t < exit time."""
    out = []
    for r in trace.records:
        if r.entry_time > t:
            continue
        state = record_state(trace.spec, r)
        if t < exit_time(state, trace.spec):
            out.append(state)
    return out


def snapshot_for(trace: SimulationTrace, index: int) -> tuple[AircraftState, list[AircraftState]]:
    """Nominal state of record ``index`` and the aircraft it resolved against."""
    r = trace.records[index]
    geo = flow_geometry(trace.spec, r.flow)
    mover = AircraftState.at_entry(r.id, r.flow, geo.gate_point(r.start_position),
                                   geo.heading * trace.spec.speed, r.entry_time, 0.0,
                                   r.start_position)
    intruders = []
    for prior in trace.records[:index]:
        state = record_state(trace.spec, prior)
        if exit_time(state, trace.spec) > r.entry_time:
            intruders.append(state)
    return mover, intruders


def run_many(specs, workers: int = 1) -> list[SimulationTrace]:
    """Independent runs, returned in the order of ``specs``."""
    specs = list(specs)
    if workers <= 1 or len(specs) <= 1:
        return [run(s) for s in specs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, specs))
