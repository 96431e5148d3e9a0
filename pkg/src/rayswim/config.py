"""Experiment configuration.

Grammar, one setting per line:

    # comment
    dotted.key = value

Values are integers, floats, `true`/`false`, comma-separated float lists or
bare strings; the type of every key is fixed by its entry in `DEFAULTS`.
Unknown keys are errors. Command-line overrides use the same `key=value`
form.
"""

import hashlib
import logging
import math

from .actuation import FinOscillator, MagnetizedFin
from .control import Segment, YawSchedule, make_plan
from .exceptions import ConfigError, InputError, NotCalibratedError
from .field import CoilAxis, DriveSignal, TriaxialCoil
from .geometry import Fin, RobotGeometry, magnetized_volume
from .kinematics import FinWaveParams
from .locomotion import HydroParams, Swimmer
from .utils import mm_to_m

logger = logging.getLogger(__name__)

DEFAULTS = {
    "geometry.body_length": 11.34,
    "geometry.body_width": 2.0,
    "geometry.body_height": 1.5,
    "geometry.overall_width": 20.56,
    "geometry.front_fin.width": 9.72,
    "geometry.front_fin.length": 1.0,
    "geometry.front_fin.thickness": 0.12,
    "geometry.rear_fin.width": 9.41,
    "geometry.rear_fin.length": 8.66,
    "geometry.rear_fin.thickness": 0.12,
    "geometry.profile": "0018",
    "geometry.profile_points": 101,
    "coil.x.turns": 900,
    "coil.x.resistance": 14.38,
    "coil.x.effective_radius": 190.0,
    "coil.x.inner_diameter": 324.0,
    "coil.x.outer_diameter": 418.0,
    "coil.y.turns": 648,
    "coil.y.resistance": 7.83,
    "coil.y.effective_radius": 140.0,
    "coil.y.inner_diameter": 230.0,
    "coil.y.outer_diameter": 310.0,
    "coil.z.turns": 480,
    "coil.z.resistance": 4.23,
    "coil.z.effective_radius": 100.0,
    "coil.z.inner_diameter": 140.0,
    "coil.z.outer_diameter": 224.0,
    "coil.segments": 720,
    "coil.wire_radius": 0.6,
    "actuation.remanence": 6e4,
    "actuation.inertia": 3.6932e-10,
    "actuation.damping": 3.95e-8,
    "actuation.stiffness": 1.928e-6,
    "actuation.max_deflection": 0.6,
    "hydro.mass": 2e-4,
    "hydro.thrust_coefficient": 6.9577e-6,
    "hydro.drag_coefficient": 2e-6,
    "hydro.heading_frequency": 3.0,
    "hydro.heading_damping": 0.1,
    "hydro.field_gain": 1.0,
    "kinematics.swing_amplitude": 0.5,
    "kinematics.oscillation_amplitude": 0.5,
    "kinematics.decay_rate": 0.1,
    "kinematics.wavenumber": 0.3,
    "kinematics.phase_delay": 0.5,
    "kinematics.frequency": 11.0,
    "kinematics.nx": 21,
    "kinematics.ny": 21,
    "kinematics.nt": 16,
    "drive.b_list": [1.5, 2.25, 3.0, 4.0, 5.0],
    "drive.f_list": [1.0, 3.0, 5.0, 7.0, 11.0, 13.0, 15.0],
    "drive.b_xy": 4.0,
    "drive.pitch": 45.0,
    "drive.frequency": 11.0,
    "plan.leg": 20.0,
    "plan.decomposition_dwell": 0.0,
    "plan.yaw_jitter": 0.0,
    "plan.registered": False,
    "integrator.dt": 1e-3,
    "homogeneity.tolerances": [0.01, 0.02, 0.05],
    "homogeneity.grid_step": 2.0,
    "homogeneity.extent": 0.0,
    "homogeneity.scan_extent": 20.0,
    "output.dir": "out",
    "calibration.fitted": False,
    "calibration.peak_speed": 5.25,
    "calibration.peak_field": 5.0,
    "calibration.peak_frequency": 11.0,
    "calibration.penalty": 1e3,
    "calibration.span": 0.7,
    "calibration.max_passes": 50,
    "study.turn_field": 3.0,
    "study.turn_frequency": 7.0,
    "study.turn_angles": [-30.0, -60.0, -90.0, 30.0, 60.0],
    "study.series_angles": [30.0, 60.0],
    "study.series_fields": [1.5, 2.25, 3.0, 4.0, 5.0],
    "study.series_field_frequency": 11.0,
    "study.series_frequencies": [8.0, 11.0, 14.0, 16.0],
    "study.series_frequency_field": 5.0,
    "study.dwell": 12.0,
    "study.decompose_angle": 60.0,
    "study.decompose_steps": 2,
    "study.decompose_dwell": 0.0,
    "seed": 0,
}

# Keys whose value must be strictly positive
_POSITIVE = {
    "integrator.dt",
    "homogeneity.grid_step",
    "plan.leg",
    "drive.frequency",
    "kinematics.frequency",
    "calibration.peak_speed",
    "calibration.peak_field",
    "calibration.peak_frequency",
    "calibration.span",
    "study.dwell",
}
# Dwells of a decomposed turn; 0 picks half the heading servo's damped period
_DWELLS = ("plan.decomposition_dwell", "study.decompose_dwell")
_NON_EMPTY = {key for key, value in DEFAULTS.items() if isinstance(value, list)}


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return ", ".join(repr(float(v)) for v in value)
    return str(value)


def _convert(key, raw, line=None):
    default = DEFAULTS[key]
    try:
        if isinstance(default, bool):
            if raw not in ("true", "false"):
                raise ValueError(raw)
            return raw == "true"
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError(raw)
            return value
        if isinstance(default, list):
            items = [float(item) for item in raw.split(",") if item.strip()]
            if not all(math.isfinite(item) for item in items):
                raise ValueError(raw)
            return items
    except ValueError:
        kind = type(default).__name__
        raise ConfigError(key, f"cannot read {raw!r} as {kind}", line)
    if not raw:
        raise ConfigError(key, "empty value", line)
    return raw


def parse_lines(text):
    """Yield `(line_number, key, raw_value)` for every setting in `text`."""

    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(line, "expected `key = value`", number)
        key, raw = (part.strip() for part in line.split("=", 1))
        yield number, key, raw


class ExperimentConfig:
    """Typed, validated settings.

        >>> config = ExperimentConfig.parse("drive.b_xy = 3\\n")
        >>> config["drive.b_xy"]
        <<< 3.0
    """

    def __init__(self, values=None):
        merged = {key: _copy(key, value) for key, value in DEFAULTS.items()}
        for key, value in (values or {}).items():
            if key not in DEFAULTS:
                raise ConfigError(key, "unknown key")
            merged[key] = _copy(key, value)
        self._values = merged
        self._validate()

    @classmethod
    def parse(cls, text):
        values = {}
        for number, key, raw in parse_lines(text):
            if key not in DEFAULTS:
                raise ConfigError(key, "unknown key", number)
            values[key] = _convert(key, raw, number)
        return cls(values)

    @classmethod
    def load(cls, path):
        try:
            with open(path) as f:
                text = f.read()
        except OSError as exc:
            raise ConfigError(str(path), f"cannot read config: {exc.strerror}")
        logger.debug("loaded config from %s", path)
        return cls.parse(text)

    def override(self, assignments):
        """New config with `key=value` strings applied on top."""

        values = dict(self._values)
        for assignment in assignments:
            if "=" not in assignment:
                raise ConfigError(assignment, "expected `key=value`")
            key, raw = (part.strip() for part in assignment.split("=", 1))
            if key not in DEFAULTS:
                raise ConfigError(key, "unknown key")
            values[key] = _convert(key, raw)
        return ExperimentConfig(values)

    def with_values(self, values):
        merged = dict(self._values)
        merged.update(values)
        return ExperimentConfig(merged)

    def serialize(self):
        return "".join(
            f"{key} = {_format(self._values[key])}\n" for key in sorted(self._values)
        )

    @property
    def sha256(self):
        return hashlib.sha256(self.serialize().encode("utf-8")).hexdigest()

    def __getitem__(self, key):
        return _copy(key, self._values[key])

    def __eq__(self, other):
        if not isinstance(other, ExperimentConfig):
            return NotImplemented
        return self.serialize() == other.serialize()

    def __repr__(self):
        return f"ExperimentConfig(sha256={self.sha256[:12]})"

    def _validate(self):
        for key in _POSITIVE:
            if not self._values[key] > 0:
                raise ConfigError(key, "must be > 0")
        for key in _NON_EMPTY:
            if not self._values[key]:
                raise ConfigError(key, "grid must not be empty")
        if min(self._values["drive.b_list"] + self._values["drive.f_list"]) < 0:
            raise ConfigError("drive", "field strengths and frequencies must be >= 0")
        if not all(0 < t < 1 for t in self._values["homogeneity.tolerances"]):
            raise ConfigError("homogeneity.tolerances", "must be in (0, 1)")
        if self._values["study.decompose_steps"] < 1:
            raise ConfigError("study.decompose_steps", "need at least one step")
        for key in _DWELLS:
            if self._values[key] < 0:
                raise ConfigError(key, "must be >= 0")
        # Domain invariants of the built objects
        for build in (self.geometry, self.coil, self.swimmer, self.wave_params):
            try:
                build()
            except InputError as exc:
                raise ConfigError(exc.what, exc.reason)

    # Domain objects

    @property
    def calibrated(self):
        return self._values["calibration.fitted"]

    def require_calibrated(self):
        if not self.calibrated:
            raise NotCalibratedError()

    def geometry(self):
        v = self._values
        return RobotGeometry(
            body_length=v["geometry.body_length"],
            body_width=v["geometry.body_width"],
            body_height=v["geometry.body_height"],
            overall_width=v["geometry.overall_width"],
            front_fin=Fin(*(v[f"geometry.front_fin.{n}"] for n in _FIN)),
            rear_fin=Fin(*(v[f"geometry.rear_fin.{n}"] for n in _FIN)),
        )

    def coil(self):
        return TriaxialCoil(
            tuple(
                CoilAxis(axis, *(self._values[f"coil.{axis}.{n}"] for n in _COIL))
                for axis in "xyz"
            )
        )

    @property
    def wire_radius(self):
        """Wire radius in metres, the closest a field point may sit to a loop."""

        return mm_to_m(self._values["coil.wire_radius"])

    def magnetized_fin(self):
        return MagnetizedFin(
            magnetized_volume(self.geometry()), self._values["actuation.remanence"]
        )

    def oscillator(self):
        v = self._values
        return FinOscillator(
            inertia=v["actuation.inertia"],
            damping=v["actuation.damping"],
            stiffness=v["actuation.stiffness"],
            max_deflection=v["actuation.max_deflection"],
        )

    def hydro(self):
        return HydroParams(
            **{name: self._values[f"hydro.{name}"] for name in _HYDRO}
        )

    def swimmer(self):
        return Swimmer(self.magnetized_fin(), self.oscillator(), self.hydro())

    def wave_params(self):
        v = self._values
        front = v["geometry.front_fin.width"]
        return FinWaveParams(
            swing_amplitude=v["kinematics.swing_amplitude"],
            oscillation_amplitude=v["kinematics.oscillation_amplitude"],
            decay_rate=v["kinematics.decay_rate"],
            wavenumber=v["kinematics.wavenumber"],
            phase_delay=v["kinematics.phase_delay"],
            angular_frequency=2 * math.pi * v["kinematics.frequency"],
            chord=v["geometry.front_fin.length"] + v["geometry.rear_fin.length"],
            span=front,
        )

    def drive(self, yaw=0.0):
        v = self._values
        return DriveSignal.from_pitch(
            v["drive.b_xy"], yaw, v["drive.pitch"], v["drive.frequency"]
        )

    def dwell(self, key):
        """Seconds to hold each intermediate heading of a decomposed turn."""

        if self._values[key] > 0:
            return self._values[key]
        return self.hydro().shaped_dwell(self._values["drive.b_xy"])


_FIN = ("width", "length", "thickness")
_COIL = ("turns", "resistance", "effective_radius", "inner_diameter", "outer_diameter")
_HYDRO = (
    "mass",
    "thrust_coefficient",
    "drag_coefficient",
    "heading_frequency",
    "heading_damping",
    "field_gain",
)


def _copy(key, value):
    """`value` coerced to the type of the key's default."""

    default = DEFAULTS[key]
    if isinstance(default, list):
        return [float(item) for item in value]
    if isinstance(default, float) and not isinstance(value, bool):
        return float(value)
    if type(value) is not type(default):
        raise ConfigError(key, f"expected {type(default).__name__}, got {value!r}")
    return value


PLAN_KEYS = ("name", "yaws", "amounts", "unit")


def parse_plan(text, config):
    """Custom plan file: `name`, `yaws` (deg list), `amounts` (list) and
    `unit` (`mm` or `s`), in the config grammar. Runs under the config's
    drive; timed legs are drawn at the nominal steady speed."""

    fields = {}
    for number, key, raw in parse_lines(text):
        if key not in PLAN_KEYS:
            raise ConfigError(key, "unknown plan key", number)
        fields[key] = raw
    missing = [key for key in ("yaws", "amounts") if key not in fields]
    if missing:
        raise ConfigError(", ".join(missing), "missing from plan")
    try:
        yaws = [float(item) for item in fields["yaws"].split(",")]
        amounts = [float(item) for item in fields["amounts"].split(",")]
    except ValueError:
        raise ConfigError("yaws/amounts", "expected comma-separated numbers")
    if len(yaws) != len(amounts):
        raise ConfigError("amounts", "need one amount per yaw")
    unit = fields.get("unit", "mm")
    try:
        schedule = YawSchedule(Segment(y, a, unit) for y, a in zip(yaws, amounts))
        drive = config.drive(yaws[0])
        speed = config.swimmer().steady_speed(drive.b_z, drive.frequency)
        return make_plan(fields.get("name", "custom"), schedule, drive, speed)
    except InputError as exc:
        raise ConfigError(exc.what, exc.reason)


def load_plan(path, config):
    try:
        with open(path) as f:
            return parse_plan(f.read(), config)
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read plan: {exc.strerror}")


def plan_text(plan):
    segments = plan.schedule.segments
    units = {s.unit for s in segments}
    if len(units) != 1:
        raise ConfigError("unit", "a plan file holds a single unit")
    return (
        f"name = {plan.name}\n"
        f"yaws = {_format([s.yaw for s in segments])}\n"
        f"amounts = {_format([s.amount for s in segments])}\n"
        f"unit = {units.pop()}\n"
    )
