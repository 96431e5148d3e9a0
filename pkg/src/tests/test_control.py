import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rayswim.control import (
    Segment,
    YawSchedule,
    builtin_plan,
    decompose_turn,
    deviation_metrics,
    polyline_distance,
    register,
    target_polyline,
    turn_responses,
)
from rayswim.exceptions import InputError
from rayswim.locomotion import simulate

from .utils import calibrated_config, polyline_points, record_along


def test_decompose_turn():
    assert decompose_turn(90, 2, 1.0).increments() == [45.0, 45.0]
    single = decompose_turn(60, 1, 2.5)
    assert single.segments == (Segment(60.0, 2.5, "s"),)
    assert single.mode == "time"


def test_decomposition_reaches_the_square_waypoints():
    assert decompose_turn(-180, 4, 1.0).yaws == [-45.0, -90.0, -135.0, 180.0]
    assert decompose_turn(-90, 2, 1.0, start_yaw=-180).yaws == [135.0, 90.0]


@given(st.floats(-179.0, 179.0), st.integers(1, 8), st.floats(-170.0, 170.0))
def test_decomposition_conserves_the_turn(delta, steps, start):
    schedule = decompose_turn(delta, steps, 0.5, start_yaw=start)
    increments = schedule.increments(initial_yaw=start)
    assert len(increments) == steps
    assert sum(increments) == pytest.approx(delta, abs=1e-9)
    assert all(i == pytest.approx(delta / steps, abs=1e-9) for i in increments)


@pytest.mark.parametrize("steps", [0, -1, 1.5])
def test_decompose_needs_steps(steps):
    with pytest.raises(InputError):
        decompose_turn(60, steps, 1.0)


def test_decompose_needs_dwell():
    with pytest.raises(InputError):
        decompose_turn(60, 2, 0.0)


@pytest.mark.parametrize("delta", [270.0, -181.0])
def test_decompose_rejects_more_than_half_a_turn(delta):
    with pytest.raises(InputError):
        decompose_turn(delta, 1, 1.0)
    assert decompose_turn(180.0, 2, 1.0).yaws == [90.0, 180.0]


def test_builtin_plans():
    assert builtin_plan("Z").schedule.yaws == [0.0, -45.0, 0.0]
    assert builtin_plan("nabla").schedule.yaws == [-45.0, 75.0, -165.0]
    square = builtin_plan("square", dwell=0.5, speed=4.0)
    assert square.schedule.yaws == [0.0, -45.0, -90.0, -135.0, 180.0, 135.0, 90.0]
    assert square.schedule.increments()[1:] == [-45.0] * 6
    assert square.schedule.mode == "mixed"
    # Odd headings are held 0.5 s and drawn as 2 mm legs
    assert [s.unit for s in square.schedule.segments] == ["mm", "s"] * 3 + ["mm"]
    assert np.linalg.norm(square.target[2] - square.target[1]) == pytest.approx(2.0)
    for name in ("Z", "square", "nabla"):
        plan = builtin_plan(name, speed=4.0)
        assert plan.drive.b_xy == 4.0
        assert plan.drive.frequency == 11.0
        assert plan.drive.pitch == pytest.approx(45.0)
        assert len(plan.target) == len(plan.schedule.segments) + 1
    assert builtin_plan("Z").schedule.mode == "distance"
    with pytest.raises(InputError):
        builtin_plan("square")


def test_unknown_plan():
    with pytest.raises(InputError):
        builtin_plan("circle")


def test_target_polyline():
    target = builtin_plan("Z", leg=10.0).target
    leg = 10 / math.sqrt(2)
    assert target == pytest.approx(
        np.array([[0, 0], [10, 0], [10 + leg, -leg], [20 + leg, -leg]])
    )
    with pytest.raises(InputError):
        target_polyline(decompose_turn(60, 2, 1.0))
    timed = target_polyline(decompose_turn(90, 1, 2.0), speed=3.0)
    assert timed[-1] == pytest.approx([0.0, 6.0])


def test_segment_validation():
    with pytest.raises(InputError):
        Segment(-180.0, 1.0)
    with pytest.raises(InputError):
        Segment(0.0, 0.0)
    with pytest.raises(InputError):
        Segment(0.0, 1.0, "km")
    assert YawSchedule([Segment(0.0, 1.0), Segment(0.0, 1.0, "s")]).mode == "mixed"


def test_polyline_distance():
    vertices = np.array([[0.0, 0.0], [10.0, 0.0], [10.0, 10.0]])
    points = [[5.0, 3.0], [-3.0, -4.0], [12.0, 5.0], [10.0, 0.0]]
    assert polyline_distance(points, vertices) == pytest.approx([3.0, 5.0, 2.0, 0.0])


def test_registration_undoes_a_shift():
    vertices = builtin_plan("Z").target
    points, _ = polyline_points(vertices)
    offset = register(points + [0.7, -0.4], vertices)
    assert offset == pytest.approx([-0.7, 0.4], abs=1e-3)


def test_metrics_are_unregistered_by_default():
    vertices = builtin_plan("Z").target
    points, yaws = polyline_points(vertices)
    record = record_along(points + [0.0, 0.5], yaws)
    plain = deviation_metrics(record, vertices)
    assert plain.offset == (0.0, 0.0)
    assert plain.max_dev == pytest.approx(0.5, abs=1e-6)
    registered = deviation_metrics(record, vertices, registered=True)
    assert registered.max_dev < 1e-2


def test_path_on_target_has_no_deviation():
    vertices = builtin_plan("Z").target
    points, yaws = polyline_points(vertices)
    metrics = deviation_metrics(record_along(points, yaws), vertices)
    assert metrics.max_dev == pytest.approx(0.0, abs=1e-9)
    assert metrics.mean_dev == pytest.approx(0.0, abs=1e-9)


def test_straight_run_has_no_overshoot():
    vertices = np.array([[0.0, 0.0], [20.0, 0.0]])
    points, yaws = polyline_points(vertices)
    metrics = deviation_metrics(record_along(points, yaws), vertices)
    assert metrics.peak_overshoot == 0.0
    assert metrics.settling_time == 0.0
    assert metrics.turns == ()


def test_degenerate_trajectory():
    record = record_along([[0.0, 0.0]], [0.0])
    with pytest.raises(InputError):
        deviation_metrics(record, np.array([[0.0, 0.0], [1.0, 0.0]]))


def test_turn_response_of_a_scripted_heading():
    # Heading swings past 30° to 36° then returns and stays
    heading = np.radians([0, 0, 20, 36, 33, 31, 30, 30, 30])
    record = dataclasses.replace(
        record_along(np.zeros((9, 2)) + np.arange(9)[:, None] * [1.0, 0.0], heading),
        epochs=((0, 0.0, 0.0), (1, 0.1, 30.0)),
    )
    (response,) = turn_responses(record)
    assert response.delta == 30.0
    assert response.overshoot == pytest.approx(6.0)
    # Last sample outside the 2° band is 33° at t = 0.4
    assert response.settling_time == pytest.approx(0.4)
    assert response.settled


def _mirror(record):
    return dataclasses.replace(
        record,
        y=-record.y,
        heading=-record.heading,
        vy=-record.vy,
        gamma=-record.gamma,
        epochs=tuple((i, t, -yaw + 0.0) for i, t, yaw in record.epochs),
    )


def test_metrics_are_mirror_symmetric():
    config = calibrated_config()
    plan = builtin_plan("Z")
    record = simulate(config.swimmer(), plan.schedule, plan.drive, dt=2e-3)
    mirrored_target = plan.target * [1.0, -1.0]
    a = deviation_metrics(record, plan.target)
    b = deviation_metrics(_mirror(record), mirrored_target)
    assert b.max_dev == pytest.approx(a.max_dev, abs=1e-3)
    assert b.mean_dev == pytest.approx(a.mean_dev, abs=1e-3)
    assert b.peak_overshoot == pytest.approx(a.peak_overshoot, abs=1e-9)
    assert b.settling_time == pytest.approx(a.settling_time, abs=1e-9)


def test_overshoot_and_settling_are_reported_per_turn():
    config = calibrated_config()
    plan = builtin_plan("Z")
    record = simulate(config.swimmer(), plan.schedule, plan.drive, dt=2e-3)
    metrics = deviation_metrics(record, plan.target)
    assert [turn.delta for turn in metrics.turns] == [-45.0, 45.0]
    assert metrics.peak_overshoot > 0
    assert metrics.settling_time > 0
    assert math.isfinite(metrics.max_dev)
    assert metrics.as_dict()["turns"][0]["delta"] == -45.0
