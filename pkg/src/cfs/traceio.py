"""Trace files: a ``#`` metadata header, then one comma-separated record per line."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import fields

from .engine import AircraftRecord, SimulationTrace
from .kinematics import ControlArea, Vec2
from .scenario import FLOWS, ScenarioSpec

COLUMNS = ("id", "flow", "entry_time", "start_position", "offset", "exit_lateral",
           "intruder_count", "binding_intruder")
MAGIC = "cfs-trace"


class TraceFormatError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _g(x: float) -> str:
    return f"{x:.9g}"


def spec_header(spec: ScenarioSpec) -> dict[str, str]:
    """Exact (round-trippable) rendering of every spec field."""
    out = {}
    for f in fields(spec):
        value = getattr(spec, f.name)
        if f.name == "area":
            out["spec.area.center_x"] = repr(value.center.x)
            out["spec.area.center_y"] = repr(value.center.y)
            out["spec.area.radius"] = repr(value.radius)
        else:
            out[f"spec.{f.name}"] = repr(value) if not isinstance(value, str) else value
    return out


def spec_from_header(header: dict[str, str]) -> ScenarioSpec:
    kwargs = {}
    area = {}
    for key, text in header.items():
        if not key.startswith("spec."):
            continue
        name = key[5:]
        if name.startswith("area."):
            area[name[5:]] = float(text)
        elif name in ("kind", "horizon", "distribution"):
            kwargs[name] = text
        elif name in ("seed", "n_aircraft"):
            kwargs[name] = int(text)
        elif name.startswith("gate_distance"):
            kwargs[name] = None if text == "None" else float(text)
        else:
            kwargs[name] = float(text)
    if area:
        kwargs["area"] = ControlArea(Vec2(area.get("center_x", 0.0), area.get("center_y", 0.0)),
                                     area.get("radius", 100.0))
    return ScenarioSpec(**kwargs)


def format_trace(trace: SimulationTrace) -> str:
    buf = io.StringIO()
    buf.write(f"# {MAGIC}\n")
    meta = dict(trace.metadata)
    meta["records"] = len(trace.records)
    for key, value in {**meta, **spec_header(trace.spec)}.items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in trace.records:
        writer.writerow([r.id, r.flow, _g(r.entry_time), _g(r.start_position), _g(r.offset),
                         _g(r.exit_lateral), r.intruder_count,
                         "" if r.binding_intruder is None else r.binding_intruder])
    return buf.getvalue()


def write_trace(trace: SimulationTrace, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(format_trace(trace))


def parse_trace(text: str) -> SimulationTrace:
    lines = text.splitlines()
    header: dict[str, str] = {}
    k = 0
    if not lines or lines[0].strip() != f"# {MAGIC}":
        raise TraceFormatError(1, f"missing '# {MAGIC}' marker")
    while k < len(lines) and lines[k].startswith("#"):
        body = lines[k][1:].strip()
        if ":" in body:
            key, _, value = body.partition(":")
            header[key.strip()] = value.strip()
        k += 1
    try:
        spec = spec_from_header(header)
    except (ValueError, TypeError) as exc:
        raise TraceFormatError(k, f"bad scenario header: {exc}") from None
    if k >= len(lines):
        raise TraceFormatError(k + 1, "missing column header row")
    if tuple(c.strip() for c in lines[k].split(",")) != COLUMNS:
        raise TraceFormatError(k + 1, f"expected column header {','.join(COLUMNS)}")
    records = []
    for lineno, row in enumerate(csv.reader(lines[k + 1:]), start=k + 2):
        if not row:
            continue
        if len(row) != len(COLUMNS):
            raise TraceFormatError(lineno, f"expected {len(COLUMNS)} fields, got {len(row)}")
        try:
            rec = AircraftRecord(int(row[0]), row[1], float(row[2]), float(row[3]),
                                 float(row[4]), float(row[5]), int(row[6]),
                                 int(row[7]) if row[7] else None)
        except ValueError as exc:
            raise TraceFormatError(lineno, str(exc)) from None
        if rec.flow not in FLOWS:
            raise TraceFormatError(lineno, f"unknown flow {rec.flow!r}")
        if not all(math.isfinite(v) for v in (rec.entry_time, rec.start_position, rec.offset,
                                               rec.exit_lateral)):
            raise TraceFormatError(lineno, "non-finite value")
        records.append(rec)
    expected = header.get("records")
    if expected is not None and int(expected) != len(records):
        raise TraceFormatError(len(lines) + 1,
                               f"expected {expected} records, found {len(records)} (truncated?)")
    meta = {key: value for key, value in header.items()
            if not key.startswith("spec.") and key != "records"}
    return SimulationTrace(spec, records, meta)


def read_trace(path) -> SimulationTrace:
    with open(path, newline="") as fh:
        return parse_trace(fh.read())
