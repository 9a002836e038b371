import math

import pytest

from cfs.analysis import verify_trace
from cfs.config import ConfigError, RunConfig, format_config, parse_config
from cfs.engine import run
from cfs.kinematics import ControlArea, Vec2
from cfs.scenario import ScenarioSpec
from cfs.traceio import COLUMNS, TraceFormatError, format_trace, parse_trace


@pytest.fixture(scope="module")
def trace():
    return run(ScenarioSpec(kind="pseudo_random", L0=10, n_aircraft=200, seed=3))


def test_trace_format(trace):
    text = format_trace(trace)
    lines = text.splitlines()
    assert lines[0] == "# cfs-trace"
    header = [l for l in lines if l.startswith("#")]
    for key in ("seed", "generator", "spec_hash", "version", "horizon"):
        assert any(l.startswith(f"# {key}: ") for l in header)
    assert lines[len(header)] == ",".join(COLUMNS)
    assert len(lines) == len(header) + 1 + 400
    # 9 significant digits
    assert lines[-1].split(",")[4] == f"{trace.records[-1].offset:.9g}"


def test_trace_round_trip(trace):
    back = parse_trace(format_trace(trace))
    assert back.spec == trace.spec
    assert back.metadata == {k: str(v) for k, v in trace.metadata.items()}
    assert [r.id for r in back.records] == [r.id for r in trace.records]
    for a, b in zip(back.records, trace.records):
        assert a.offset == pytest.approx(b.offset, rel=1e-8, abs=1e-9)
        assert (a.flow, a.intruder_count, a.binding_intruder) == (
            b.flow, b.intruder_count, b.binding_intruder)
    r1, r2 = verify_trace(trace), verify_trace(back)
    assert r1.to_text() == r2.to_text()
    assert r1.to_json() == r2.to_json()


def test_trace_round_trip_custom_area():
    spec = ScenarioSpec(n_aircraft=3, area=ControlArea(Vec2(5.0, -2.0), 80.0),
                        gate_distance_b=60.0, theta=math.pi / 2, horizon="unbounded")
    assert parse_trace(format_trace(run(spec))).spec == spec


def test_truncated_trace(trace):
    lines = format_trace(trace).splitlines()
    with pytest.raises(TraceFormatError, match="truncated"):
        parse_trace("\n".join(lines[:-5]) + "\n")
    cut = "\n".join(lines[:-1]) + "\n" + lines[-1][:8] + "\n"
    with pytest.raises(TraceFormatError) as err:
        parse_trace(cut)
    assert err.value.line == len(lines)


@pytest.mark.parametrize("mutate,match", [
    (lambda ls: ls[1:], "marker"),
    (lambda ls: [l for l in ls if not l.startswith("id,")], "column header"),
    (lambda ls: ls[:-1] + [ls[-1].replace(",A,", ",Q,").replace(",B,", ",Q,")], "unknown flow"),
    (lambda ls: ls[:-1] + [",".join(ls[-1].split(",")[:4] + ["nan"] + ls[-1].split(",")[5:])],
     "non-finite"),
])
def test_malformed_trace(trace, mutate, match):
    lines = format_trace(trace).splitlines()
    with pytest.raises(TraceFormatError, match=match):
        parse_trace("\n".join(mutate(lines)) + "\n")


def test_config_defaults_round_trip():
    cfg = RunConfig()
    assert parse_config(format_config(cfg)) == cfg


def test_config_round_trip_custom():
    cfg = RunConfig(kind="pseudo_random", L0=10.0, seed=7, phase="worst", emit=("histogram",),
                    gate_distance_a=80.0, horizon="unbounded", oracle_check=True)
    with pytest.raises(ConfigError):
        # a worst-case phase does not exist for pseudo-random flows
        parse_config(format_config(cfg))
    cfg = cfg.with_values(phase=0.25)
    assert parse_config(format_config(cfg)) == cfg


def test_config_units():
    cfg = parse_config("[scenario]\nkind = angle\ntheta = 60\n")
    assert cfg.spec().theta == pytest.approx(math.radians(60))
    cfg = parse_config("[scenario]\nphase = worst\n")
    assert cfg.phase == "worst" and cfg.spec().phase == 0.0
    cfg = parse_config("[scenario]\nphase = worst\ngate_distance_b = 60\n")
    assert cfg.spec().phase == 5.0


@pytest.mark.parametrize("text,key,line", [
    ("[scenario]\nsep = -1\n", "sep", 2),
    ("[run]\nemit =\n", "emit", None),
    ("[scenario]\nkind = orthogonal\nbogus = 3\n", "bogus", 3),
    ("[scenario]\ntheta = ninety\n", "theta", 2),
    ("[scenario]\nsep = 1\nsep = 2\n", "sep", 3),
    ("[nowhere]\n", "[nowhere]", 1),
    ("sep = 5\n", "<header>", 1),
    ("[run]\nworkers = 0\n", "workers", 2),
    ("[area]\nradius = -5\n", "radius", 2),
])
def test_config_errors(text, key, line):
    with pytest.raises(ConfigError) as err:
        parse_config(text, "c.ini")
    assert err.value.key == key
    if line is not None:
        assert err.value.line == line
        assert f"c.ini:{line}" in str(err.value)


def test_output_dir_env(monkeypatch):
    cfg = RunConfig(output_dir="here")
    monkeypatch.delenv("CFS_OUTPUT_DIR", raising=False)
    assert cfg.resolved_output_dir() == "here"
    monkeypatch.setenv("CFS_OUTPUT_DIR", "/tmp/elsewhere")
    assert cfg.resolved_output_dir() == "/tmp/elsewhere"
