"""Run configuration files: ``[section]`` headers and ``key = value`` lines.

Angles are in degrees here and converted to radians for the scenario.
``phase = worst`` selects the phase that makes paired entrants meet.
"""

from __future__ import annotations

import configparser
import math
import os
import re
from dataclasses import dataclass, fields, replace

from .kinematics import ControlArea, Vec2
from .scenario import InvalidScenario, ScenarioSpec, worst_case_phase

EMITTABLE = ("trace", "histogram", "report")
ENV_OUTPUT_DIR = "CFS_OUTPUT_DIR"


class ConfigError(ValueError):
    def __init__(self, key: str, message: str, line: int | None = None, source: str = "<config>"):
        where = f"{source}:{line}" if line else source
        super().__init__(f"{where}: {key}: {message}")
        self.key, self.line, self.source = key, line, source


def _opt_float(text: str):
    return None if text.lower() in ("", "none") else float(text)


def _phase(text: str):
    return "worst" if text.strip().lower() == "worst" else float(text)


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _emit(text: str) -> tuple[str, ...]:
    items = tuple(x.strip() for x in text.split(",") if x.strip())
    for x in items:
        if x not in EMITTABLE:
            raise ValueError(f"unknown artifact {x!r} (choose from {', '.join(EMITTABLE)})")
    return items


# (section, key, parser)
SCHEMA = (
    ("scenario", "kind", str),
    ("scenario", "theta", float),
    ("scenario", "L0", float),
    ("scenario", "sep", float),
    ("scenario", "speed", float),
    ("scenario", "arrival_period", float),
    ("scenario", "phase", _phase),
    ("scenario", "seed", int),
    ("scenario", "n_aircraft", int),
    ("scenario", "horizon", str),
    ("scenario", "max_offset", float),
    ("scenario", "gate_distance_a", _opt_float),
    ("scenario", "gate_distance_b", _opt_float),
    ("scenario", "distribution", str),
    ("area", "center_x", float),
    ("area", "center_y", float),
    ("area", "radius", float),
    ("run", "output_dir", str),
    ("run", "emit", _emit),
    ("run", "oracle_check", _bool),
    ("run", "oracle_samples", int),
    ("run", "bin_width", float),
    ("run", "workers", int),
)
_SECTION = {key: section for section, key, _ in SCHEMA}
_PARSER = {key: parser for _, key, parser in SCHEMA}


@dataclass(frozen=True)
class RunConfig:
    kind: str = "orthogonal"
    theta: float = 90.0
    L0: float = 0.0
    sep: float = 5.0
    speed: float = 8.0
    arrival_period: float = 2.5
    phase: float | str = 0.0
    seed: int = 0
    n_aircraft: int = 1000
    horizon: str = "windowed"
    max_offset: float = 100.0
    gate_distance_a: float | None = None
    gate_distance_b: float | None = None
    distribution: str = "uniform"
    center_x: float = 0.0
    center_y: float = 0.0
    radius: float = 100.0
    output_dir: str = "cfs_output"
    emit: tuple[str, ...] = ("trace", "report")
    oracle_check: bool = False
    oracle_samples: int = 20
    bin_width: float = 0.5
    workers: int = 1

    def with_values(self, **changes) -> RunConfig:
        return replace(self, **changes)

    def resolved_output_dir(self) -> str:
        return os.environ.get(ENV_OUTPUT_DIR) or self.output_dir

    def spec(self) -> ScenarioSpec:
        """Scenario for this config; raises :class:`InvalidScenario` on bad values."""
        if not self.radius > 0:
            raise InvalidScenario("radius", f"must be positive, got {self.radius}")
        area = ControlArea(Vec2(self.center_x, self.center_y), self.radius)
        kwargs = dict(kind=self.kind, theta=math.radians(self.theta), L0=self.L0, sep=self.sep,
                      area=area, speed=self.speed, arrival_period=self.arrival_period,
                      phase=0.0 if self.phase == "worst" else self.phase, seed=self.seed,
                      n_aircraft=self.n_aircraft, horizon=self.horizon,
                      max_offset=self.max_offset, gate_distance_a=self.gate_distance_a,
                      gate_distance_b=self.gate_distance_b, distribution=self.distribution)
        spec = ScenarioSpec(**kwargs)
        if self.phase == "worst":
            spec = spec.replace(phase=worst_case_phase(spec))
        return spec


def _key_lines(text: str) -> dict[tuple[str, str], int]:
    out = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        m = re.match(r"\s*\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip()
            continue
        m = re.match(r"\s*([^#;=\s][^=:]*?)\s*[=:]", line)
        if m and section is not None:
            out[(section, m.group(1))] = lineno
    return out


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(exc.option, "duplicate key", exc.lineno, source) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"[{exc.section}]", "duplicate section", exc.lineno, source) from None
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("<header>", "expected a [section] header first", exc.lineno,
                          source) from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(line.strip(), "not a 'key = value' line", lineno, source) from None
    lines = _key_lines(text)
    values = {}
    for section in parser.sections():
        if section not in ("scenario", "area", "run"):
            raise ConfigError(f"[{section}]", "unknown section", _section_line(text, section),
                              source)
        for key, raw in parser.items(section):
            line = lines.get((section, key))
            if _SECTION.get(key) != section:
                raise ConfigError(key, f"unknown key in [{section}]", line, source)
            try:
                values[key] = _PARSER[key](raw.strip())
            except ValueError as exc:
                raise ConfigError(key, str(exc), line, source) from None
    cfg = RunConfig(**values)
    validate_config(cfg, lines, source)
    return cfg


def _section_line(text: str, section: str) -> int | None:
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip() == f"[{section}]":
            return lineno
    return None


def validate_config(cfg: RunConfig, lines: dict | None = None, source: str = "<config>") -> None:
    lines = lines or {}

    def fail(key, message):
        raise ConfigError(key, message, lines.get((_SECTION.get(key, "scenario"), key)), source)

    if not cfg.emit:
        fail("emit", "must name at least one of " + ", ".join(EMITTABLE))
    if not cfg.bin_width > 0:
        fail("bin_width", f"must be positive, got {cfg.bin_width}")
    if cfg.oracle_samples < 0:
        fail("oracle_samples", "must be non-negative")
    if cfg.workers < 1:
        fail("workers", "must be at least 1")
    try:
        cfg.spec()
    except InvalidScenario as exc:
        fail(exc.key, str(exc).split(": ", 1)[-1])
    except ValueError as exc:
        fail("phase", str(exc))


def format_config(cfg: RunConfig) -> str:
    out = []
    current = None
    for f in fields(cfg):
        section = _SECTION[f.name]
        if section != current:
            if current is not None:
                out.append("")
            out.append(f"[{section}]")
            current = section
        value = getattr(cfg, f.name)
        if value is None:
            continue
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, tuple):
            text = ", ".join(value)
        elif isinstance(value, float):
            text = repr(value)
        else:
            text = str(value)
        out.append(f"{f.name} = {text}")
    return "\n".join(out) + "\n"


def load_config(path) -> RunConfig:
    with open(path) as fh:
        return parse_config(fh.read(), source=str(path))
