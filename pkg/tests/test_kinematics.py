import math

import numpy as np
import pytest

from cfs.kinematics import (AircraftState, ControlArea, NoCopresence, TimeInterval, Vec2,
                            copresence_window, in_conflict, lateral_unit, min_separation,
                            position_at, transit_window)

AREA = ControlArea()


def ac(pos, vel, t=0.0, id=0):
    return AircraftState(id, "A", Vec2(*pos), Vec2(*vel), t)


def test_vec2_rejects_nan():
    with pytest.raises(ValueError):
        Vec2(float("nan"), 0.0)
    with pytest.raises(ValueError):
        Vec2(0.0, math.inf)


def test_lateral_unit_is_right_hand_normal():
    assert lateral_unit(Vec2(0, -8)) == Vec2(-1, 0)  # southbound: right is west
    assert lateral_unit(Vec2(8, 0)) == Vec2(0, -1)  # eastbound: right is south


def test_pos0_includes_offset():
    s = AircraftState.at_entry(1, "A", Vec2(0, 100), Vec2(0, -8), 0.0, offset=3.0)
    assert s.pos0 == Vec2(-3.0, 100.0)
    assert s.shifted(0.0).pos0 == Vec2(0.0, 100.0)


@pytest.mark.parametrize("state,t,expected", [
    (((0, 100), (0, -8)), 0.0, (0, 100)),
    (((0, 100), (0, -8)), 12.5, (0, 0)),
    (((-100, 0), (8, 0)), 12.5, (0, 0)),
])
def test_position_at(state, t, expected):
    p = position_at(ac(*state), t)
    assert (p.x, p.y) == pytest.approx(expected, abs=1e-12)


def test_position_at_rejects_infinite_time():
    with pytest.raises(ValueError):
        position_at(ac((0, 0), (1, 0)), math.inf)


def test_min_separation_examples():
    inf = TimeInterval.unbounded(0.0)
    d, t = min_separation(ac((0, 100), (0, -8)), ac((-100, 0), (8, 0)), inf)
    assert d == pytest.approx(0.0, abs=1e-12) and t == pytest.approx(12.5)
    d, t = min_separation(ac((0, 0), (0, -8)), ac((3, -4), (0, -8)), inf)
    assert d == pytest.approx(5.0) and t == 0.0
    # a 5*sqrt(2) offset either way passes at exactly sep; the westward one meets
    # the eastbound intruder earlier
    for x, t_expected in ((-7.07107, 12.0581), (7.07107, 12.9419)):
        d, t = min_separation(ac((x, 100), (0, -8)), ac((-100, 0), (8, 0)), inf)
        assert d == pytest.approx(7.07107 * math.sin(math.pi / 4), abs=1e-9)
        assert t == pytest.approx(t_expected, abs=1e-4)


def test_min_separation_empty_window():
    with pytest.raises(NoCopresence):
        min_separation(ac((0, 0), (1, 0)), ac((5, 0), (1, 0)), TimeInterval.empty())


def test_min_separation_clamps_to_window():
    a, b = ac((0, 100), (0, -8)), ac((-100, 0), (8, 0))
    d, t = min_separation(a, b, TimeInterval(0.0, 10.0))
    assert t == 10.0
    assert d == pytest.approx(math.hypot(20, 20))


def test_min_separation_symmetric_and_matches_grid(rng):
    for _ in range(1000):
        pa, pb = rng.uniform(-100, 100, 2), rng.uniform(-100, 100, 2)
        ha, hb = rng.uniform(0, 2 * math.pi, 2)
        a = ac(pa, (8 * math.cos(ha), 8 * math.sin(ha)))
        b = ac(pb, (8 * math.cos(hb), 8 * math.sin(hb)))
        w = TimeInterval.unbounded(0.0)
        d_ab, t_ab = min_separation(a, b, w)
        assert d_ab == pytest.approx(min_separation(b, a, w)[0], abs=1e-12)
        dp, dv = pa - pb, np.array(tuple(a.vel - b.vel))
        tstar = -(dp @ dv) / (dv @ dv)
        closed = np.linalg.norm(dp + tstar * dv) if tstar >= 0 else np.linalg.norm(dp)
        assert d_ab == pytest.approx(closed, abs=1e-9)
        # grid oracle over the two minutes around the minimizer: some sample lies
        # within half a step of t*, where the squared distance exceeds the
        # minimum by at most (|dv| * dt / 2)^2
        grid = np.arange(max(0.0, t_ab - 1.0), t_ab + 1.0, 1e-4)
        dist = np.hypot(dp[0] + grid * dv[0], dp[1] + grid * dv[1]).min()
        assert d_ab <= dist + 1e-12
        assert dist**2 - d_ab**2 <= (np.linalg.norm(dv) * 0.5e-4) ** 2 + 1e-9
        if d_ab > 1.0:
            assert dist - d_ab <= 1e-6


def test_transit_window_examples():
    w = transit_window(ac((0, 100), (0, -8)), AREA)
    assert (w.t_start, w.t_end) == pytest.approx((0.0, 25.0))
    assert transit_window(ac((200, 300), (0, -8)), AREA).is_empty
    w = transit_window(ac((60, 100), (0, -8)), AREA)
    assert (w.t_start, w.t_end) == pytest.approx((2.5, 22.5))


def test_transit_window_endpoints_on_circle(rng):
    for _ in range(500):
        h = rng.uniform(0, 2 * math.pi)
        s = ac(rng.uniform(-300, 300, 2), (8 * math.cos(h), 8 * math.sin(h)), rng.uniform(-5, 5))
        if s.pos0.norm() <= AREA.radius:
            continue
        w = transit_window(s, AREA)
        if w.is_empty:
            continue
        for t in (w.t_start, w.t_end):
            assert abs(position_at(s, t).norm() - AREA.radius) <= 1e-9


def test_time_interval():
    e = TimeInterval.empty()
    assert e.is_empty and not e.contains(0.0)
    assert TimeInterval(0, 5).intersect(TimeInterval(6, 9)).is_empty
    assert TimeInterval(0, 5).intersect(TimeInterval(3, 9)) == TimeInterval(3, 5)


def test_copresence_modes():
    a = ac((0, 100), (0, -8))
    b = ac((-400, 0), (8, 0))
    assert copresence_window(a, b, AREA, "windowed").is_empty
    assert copresence_window(a, b, AREA, "unbounded") == TimeInterval.unbounded(0.0)
    with pytest.raises(ValueError):
        copresence_window(a, b, AREA, "sometimes")


def test_touching_is_not_a_conflict():
    a = ac((0, 0), (0, -8))
    assert not in_conflict(a, ac((5, 0), (0, -8)), 5.0, AREA, "unbounded")
    assert in_conflict(a, ac((4.999, 0), (0, -8)), 5.0, AREA, "unbounded")
