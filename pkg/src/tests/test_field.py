import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rayswim.exceptions import InputError, SingularityError
from rayswim.field import (
    CoilAxis,
    DriveSignal,
    TriaxialCoil,
    center_field_constant,
    coil_power,
    current_for_field,
    deviation_at,
    drive_currents,
    field_scan,
    helmholtz_center_field,
    homogeneity_volume,
    loop_field,
    oscillating_field,
    pair_field,
    triaxial_field,
)
from rayswim.utils import MU_0

COIL = TriaxialCoil()


def test_loop_centre_field():
    b = loop_field(0.1, 2.0, 3, [0.0, 0.0, 0.0])
    assert b[0] == pytest.approx(0.0, abs=1e-18)
    assert b[2] == pytest.approx(MU_0 * 3 * 2.0 / (2 * 0.1), rel=1e-12)


def test_loop_on_axis_field():
    z = 0.05
    b = loop_field(0.1, 1.0, 1, [0.0, 0.0, z])
    expected = MU_0 * 0.1**2 / (2 * (0.1**2 + z**2) ** 1.5)
    assert b[2] == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("axis", COIL.axes, ids=lambda a: a.axis)
def test_helmholtz_centre_field(axis):
    b = pair_field(axis, 1.5, np.zeros(3))
    expected = helmholtz_center_field(axis, 1.5)
    along = b[list("xyz").index(axis.axis)]
    assert abs(along - expected) / expected < 1e-3
    assert np.linalg.norm(b) == pytest.approx(abs(along))
    finer = pair_field(axis, 1.5, np.zeros(3), segments=1440)
    assert abs(finer - b).max() / expected < 5e-5


def test_pair_points_along_its_axis():
    for axis in COIL.axes:
        b = pair_field(axis, 1.0, [0.01, -0.02, 0.015])
        assert b @ axis.direction > 0


def test_current_for_field_inverts_centre_constant():
    axis = COIL["y"]
    current = current_for_field(axis, 3.0)
    assert current * center_field_constant(axis) == pytest.approx(3.0)
    assert current_for_field(axis, -3.0) == pytest.approx(-current)


def test_coil_power():
    assert coil_power(COIL["z"], 2.0) == pytest.approx(4 * 4.23)


def test_singularity_near_wire():
    axis = COIL["z"]
    on_wire = [axis.radius_m, 0.0, axis.radius_m / 2]
    with pytest.raises(SingularityError) as info:
        pair_field(axis, 1.0, on_wire)
    assert info.value.distance < 1e-3
    with pytest.raises(SingularityError):
        loop_field(0.1, 1.0, 1, [0.1, 0.0, 0.0])


def test_loop_rejects_bad_radius():
    with pytest.raises(InputError):
        loop_field(0.0, 1.0, 1, [0.0, 0.0, 0.0])


def test_coil_validation():
    with pytest.raises(InputError):
        CoilAxis("w", 10, 1.0, 50.0, 90.0, 110.0)
    with pytest.raises(InputError):
        CoilAxis("x", 10, 1.0, 50.0, 120.0, 110.0)
    axes = (COIL["z"], COIL["y"], COIL["x"])
    with pytest.raises(InputError):
        TriaxialCoil(axes)


@settings(max_examples=25, deadline=None)
@given(
    st.floats(-5.0, 5.0),
    st.tuples(*(st.floats(-0.03, 0.03),) * 3),
)
def test_pair_field_is_linear_in_current(current, point):
    axis = COIL["x"]
    unit = pair_field(axis, 1.0, point, segments=90)
    scaled = pair_field(axis, current, point, segments=90)
    assert np.allclose(scaled, current * unit, rtol=1e-12, atol=1e-18)


def test_triaxial_superposition():
    currents = {"x": 1.0, "y": -0.5, "z": 2.0}
    point = np.array([0.004, 0.002, -0.003])
    total = triaxial_field(COIL, currents, point)
    parts = sum(pair_field(COIL[k], v, point) for k, v in currents.items())
    assert np.allclose(total, parts, rtol=1e-12)


def test_drive_field_and_pitch():
    signal = DriveSignal.from_pitch(4.0, 90.0, 45.0, 11.0)
    assert signal.b_z == pytest.approx(4.0)
    assert signal.pitch == pytest.approx(45.0)
    b = oscillating_field(signal, 1 / (4 * 11.0))
    assert b == pytest.approx([0.0, 4.0, 4.0], abs=1e-12)
    with pytest.raises(InputError):
        DriveSignal(-1.0, 0.0, 1.0, 11.0)


def test_drive_currents_reproduce_the_field():
    signal = DriveSignal(3.0, 30.0, 2.0, 7.0)
    t = 0.01
    currents = drive_currents(COIL, signal, t)
    centre = triaxial_field(COIL, currents, np.zeros(3)) * 1e3
    assert centre == pytest.approx(oscillating_field(signal, t), abs=1e-9)


def test_field_scan_grid():
    points, b = field_scan(COIL, {"z": 1.0}, 4.0, 2.0)
    assert points.shape == (125, 3)
    assert b.shape == (125, 3)
    centre = int(np.flatnonzero(np.all(points == 0, axis=1))[0])
    assert b[centre, 2] == pytest.approx(center_field_constant(COIL["z"]))
    with pytest.raises(InputError):
        field_scan(COIL, {"z": 1.0}, 4.0, 0.0)


def test_homogeneity_box_is_uniform():
    box = homogeneity_volume(
        COIL, {"z": 1.0}, tolerance=0.01, grid_step=5.0, segments=180
    )
    assert not box.empty
    assert set(box.per_axis) == {"z"}
    corner = np.array(box.dims) / 2
    assert deviation_at(COIL, "z", corner, segments=180) <= 0.01 + 1e-6


def test_looser_tolerance_gives_more_room():
    volumes = []
    for tolerance in (0.01, 0.02, 0.05):
        box = homogeneity_volume(
            COIL, tolerance=tolerance, grid_step=6.0, segments=180
        )
        volumes.append(math.prod(box.dims))
    assert volumes[0] <= volumes[1] <= volumes[2]
    assert volumes[0] > 0


def test_homogeneity_validation():
    with pytest.raises(InputError):
        homogeneity_volume(COIL, tolerance=0.0)
    with pytest.raises(InputError):
        homogeneity_volume(COIL, grid_step=-1.0)
    with pytest.raises(InputError):
        homogeneity_volume(COIL, currents={"x": 0.0})
