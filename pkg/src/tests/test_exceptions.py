import warnings

import pytest

from rayswim.exceptions import (
    AnalysisError,
    CalibrationError,
    ConfigError,
    InputError,
    NotCalibratedError,
    RaySwimError,
    SingularityError,
    StabilityWarning,
)


def test_input_error():
    error = InputError("frequency", -1.0, "must be > 0")
    assert error.args == ("frequency", -1.0, "must be > 0")
    assert (error.what, error.value, error.reason) == ("frequency", -1.0, "must be > 0")
    assert str(error) == "frequency=-1.0: must be > 0"
    with pytest.raises(ValueError):
        raise error


def test_singularity_error():
    error = SingularityError((0.1, 0.0, 0.0), 1e-5)
    assert error.point == (0.1, 0.0, 0.0)
    assert error.distance == 1e-5
    assert str(error) == "field point (0.1, 0.0, 0.0) lies 1e-05 m from a loop filament"


def test_config_error():
    error = ConfigError("drive.b_xy", "expected a float", 3)
    assert error.key == "drive.b_xy"
    assert (error.reason, error.line) == ("expected a float", 3)
    assert str(error) == "drive.b_xy: expected a float (line 3)"
    assert str(ConfigError("seed", "expected an int")) == "seed: expected an int"


def test_calibration_errors():
    error = CalibrationError(["a", "b"])
    assert error.violations == ["a", "b"]
    assert str(error) == "calibration failed: a; b"

    error = NotCalibratedError()
    assert isinstance(error, CalibrationError)
    assert "rayswim calibrate" in str(error)


def test_hierarchy():
    for error in (
        InputError("a", 1, "b"),
        SingularityError((0, 0, 0), 0.0),
        AnalysisError("empty trace"),
        ConfigError("k", "r"),
        CalibrationError([]),
    ):
        assert isinstance(error, RaySwimError)
    assert str(AnalysisError("empty trace")) == "empty trace"


def test_stability_warning_is_a_user_warning():
    with pytest.warns(UserWarning):
        warnings.warn("coarse step", StabilityWarning)
