class RaySwimError(Exception):
    """Base class for every error raised by rayswim."""


class InputError(RaySwimError, ValueError):
    def __init__(self, what, value, reason):
        super().__init__(what, value, reason)

    @property
    def what(self):
        return self.args[0]

    @property
    def value(self):
        return self.args[1]

    @property
    def reason(self):
        return self.args[2]

    def __str__(self):
        return f"{self.what}={self.value!r}: {self.reason}"


class SingularityError(RaySwimError):
    def __init__(self, point, distance):
        super().__init__(point, distance)

    @property
    def point(self):
        return self.args[0]

    @property
    def distance(self):
        return self.args[1]

    def __str__(self):
        return (
            f"field point {tuple(self.point)} lies {self.distance:.3g} m from a "
            "loop filament"
        )


class AnalysisError(RaySwimError):
    def __init__(self, reason):
        super().__init__(reason)

    @property
    def reason(self):
        return self.args[0]

    def __str__(self):
        return self.reason


class ConfigError(RaySwimError):
    def __init__(self, key, reason, line=None):
        super().__init__(key, reason, line)

    @property
    def key(self):
        return self.args[0]

    @property
    def reason(self):
        return self.args[1]

    @property
    def line(self):
        return self.args[2]

    def __str__(self):
        where = f" (line {self.line})" if self.line is not None else ""
        return f"{self.key}: {self.reason}{where}"


class CalibrationError(RaySwimError):
    def __init__(self, violations):
        super().__init__(list(violations))

    @property
    def violations(self):
        return self.args[0]

    def __str__(self):
        return "calibration failed: " + "; ".join(self.violations)


class NotCalibratedError(CalibrationError):
    def __init__(self):
        super().__init__(
            [
                "config is not calibrated, run `rayswim calibrate` and pass the "
                "resulting config with --config"
            ]
        )


class StabilityWarning(UserWarning):
    pass
