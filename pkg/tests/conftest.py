import math

import numpy as np
import pytest

from cfs.kinematics import AircraftState, ControlArea, Vec2

SPEED = 8.0
AREA = ControlArea()


def single_encounter(theta: float, sep: float = 5.0):
    """Southbound mover at the north gate and an intruder from the angled flow, both
    reaching the area center at t=12.5."""
    mover = AircraftState.at_entry(1, "A", Vec2(0.0, 100.0), Vec2(0.0, -SPEED), 0.0)
    heading = Vec2(math.sin(theta), -math.cos(theta))
    intruder = AircraftState(0, "B", heading * -100.0, heading * SPEED, 0.0)
    return mover, intruder


def random_instance(rng: np.random.Generator, max_intruders: int = 5):
    """Mover entering at a random boundary point, heading roughly inward, against up
    to ``max_intruders`` aircraft already inside the area at equal speed, each
    aimed to pass close to the mover's path."""
    phi = rng.uniform(0, 2 * math.pi)
    entry = Vec2(100 * math.cos(phi), 100 * math.sin(phi))
    inward = phi + math.pi + rng.uniform(-0.5, 0.5)
    mover = AircraftState.at_entry(99, "A", entry,
                                   Vec2(SPEED * math.cos(inward), SPEED * math.sin(inward)), 0.0)
    intruders = []
    for k in range(int(rng.integers(1, max_intruders + 1))):
        h = rng.uniform(0, 2 * math.pi)
        vel = Vec2(SPEED * math.cos(h), SPEED * math.sin(h))
        while True:
            # aim at a point near the mover's path, arriving near the mover's time
            s = rng.uniform(10, 190)
            meet = entry + mover.vel.unit() * s + mover.lateral * rng.uniform(-8, 8)
            pos = meet - vel * (s / SPEED + rng.uniform(-1.5, 1.5))
            if pos.norm() <= 100:
                break
        intruders.append(AircraftState(k, "B", pos, vel, 0.0))
    return mover, intruders


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
