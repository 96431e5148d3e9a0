"""Yaw schedules, the built-in trajectory plans and deviation metrics."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .exceptions import InputError
from .field import DriveSignal
from .utils import wrap_degrees

logger = logging.getLogger(__name__)

# Heading band (deg) for the settling time
SETTLE_BAND = 2.0
UNITS = ("mm", "s")


@dataclass(frozen=True)
class Segment:
    """Hold commanded yaw `yaw` (deg) for `amount` mm of path or seconds."""

    yaw: float
    amount: float
    unit: str = "mm"

    def __post_init__(self):
        if not -180 < self.yaw <= 180:
            raise InputError("yaw", self.yaw, "must be in (-180, 180]")
        if not self.amount > 0:
            raise InputError("amount", self.amount, "must be > 0")
        if self.unit not in UNITS:
            raise InputError("unit", self.unit, "expected 'mm' or 's'")


@dataclass(frozen=True)
class YawSchedule:
    segments: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def mode(self):
        units = {s.unit for s in self.segments}
        if units == {"s"}:
            return "time"
        if units == {"mm"}:
            return "distance"
        return "mixed" if units else "distance"

    @property
    def yaws(self):
        return [s.yaw for s in self.segments]

    def increments(self, initial_yaw=0.0):
        """Signed yaw change (deg) at the start of each segment."""

        previous = initial_yaw
        result = []
        for segment in self.segments:
            result.append(wrap_degrees(segment.yaw - previous))
            previous = segment.yaw
        return result

    def to_distance(self, speed):
        """Replace timed segments by the path they cover at `speed` mm/s."""

        if not speed > 0:
            raise InputError("speed", speed, "must be > 0")
        return YawSchedule(
            Segment(s.yaw, s.amount * speed if s.unit == "s" else s.amount, "mm")
            for s in self.segments
        )


def decompose_turn(delta, steps, dwell, start_yaw=0.0):
    """Split a yaw change of `delta` degrees into `steps` equal increments,
    each held for `dwell` seconds.

        >>> decompose_turn(90, 2, 1.0).increments()
        <<< [45.0, 45.0]

    Yaws are wrapped, so a change beyond a half turn is ambiguous and
    rejected.
    """

    if not -180 <= delta <= 180:
        raise InputError("delta", delta, "must be within [-180, 180]")
    if not isinstance(steps, int) or steps < 1:
        raise InputError("steps", steps, "need at least one step")
    if not dwell > 0:
        raise InputError("dwell", dwell, "must be > 0")
    increment = delta / steps
    return YawSchedule(
        Segment(wrap_degrees(start_yaw + increment * (i + 1)), dwell, "s")
        for i in range(steps)
    )


def target_polyline(schedule, speed=None, start=(0.0, 0.0)):
    """Vertices (mm) of the ideal path: one leg per segment along its yaw."""

    if schedule.mode != "distance":
        if speed is None:
            raise InputError("speed", speed, "timed segments need a nominal speed")
        schedule = schedule.to_distance(speed)
    vertices = [tuple(start)]
    x, y = start
    for segment in schedule.segments:
        yaw = math.radians(segment.yaw)
        x += segment.amount * math.cos(yaw)
        y += segment.amount * math.sin(yaw)
        vertices.append((x, y))
    return np.array(vertices)


@dataclass(frozen=True)
class TrajectoryPlan:
    name: str
    schedule: YawSchedule
    drive: DriveSignal
    target: np.ndarray = field(compare=False)

    def __post_init__(self):
        if len(self.target) != len(self.schedule.segments) + 1:
            raise InputError(
                "target", len(self.target), "needs one vertex more than segments"
            )


def make_plan(name, schedule, drive, speed=None):
    return TrajectoryPlan(name, schedule, drive, target_polyline(schedule, speed))


def stepped_legs(start_yaw, delta, steps, leg, dwell):
    """A turn decomposed into `steps` increments: the intermediate headings
    are held `dwell` seconds, the last one carries a `leg` mm leg."""

    fragment = decompose_turn(delta, steps, dwell, start_yaw).segments
    return list(fragment[:-1]) + [Segment(fragment[-1].yaw, leg)]


PLANS = ("Z", "square", "nabla")


def builtin_plan(
    name, leg=20.0, dwell=0.5, speed=None, b=4.0, frequency=11.0, pitch=45.0
):
    """The three directional-swimming plans.

    Z holds 0°, -45°, 0°; nabla holds -45°, 75°, -165°; square turns each
    corner in two 45° steps, 0° through -45°, ..., 135° to 90°, holding each
    odd heading for `dwell` seconds. The square's target draws those short
    legs at `speed` mm/s, so it needs one.
    """

    if name == "Z":
        segments = [Segment(0.0, leg), Segment(-45.0, leg), Segment(0.0, leg)]
    elif name == "nabla":
        segments = [Segment(-45.0, leg), Segment(75.0, leg), Segment(-165.0, leg)]
    elif name == "square":
        segments = [Segment(0.0, leg)]
        for _ in range(3):
            segments += stepped_legs(segments[-1].yaw, -90.0, 2, leg, dwell)
    else:
        raise InputError("plan", name, f"expected one of {', '.join(PLANS)}")
    drive = DriveSignal.from_pitch(b, segments[0].yaw, pitch, frequency)
    return make_plan(name, YawSchedule(segments), drive, speed)


def polyline_distance(points, vertices):
    """Distance (mm) from each point to the nearest segment of the polyline."""

    points = np.asarray(points, dtype=float)
    a = vertices[:-1]
    ab = vertices[1:] - a
    length2 = np.sum(ab**2, axis=1)
    ap = points[:, None, :] - a[None, :, :]
    along = np.sum(ap * ab[None], axis=-1) / np.where(length2 > 0, length2, 1)
    s = np.clip(along, 0, 1)
    closest = a[None] + s[..., None] * ab[None]
    return np.min(np.linalg.norm(points[:, None, :] - closest, axis=-1), axis=1)


def register(points, vertices):
    """Translation (mm) that best lays the points onto the polyline, least
    squares on the point-to-polyline distance."""

    def cost(offset):
        return float(np.mean(polyline_distance(points + offset, vertices) ** 2))

    result = optimize.minimize(
        cost,
        x0=np.zeros(2),
        method="Nelder-Mead",
        options={"xatol": 1e-6, "fatol": 1e-12, "maxiter": 2000},
    )
    return result.x if result.fun <= cost(np.zeros(2)) else np.zeros(2)


@dataclass(frozen=True)
class TurnResponse:
    index: int
    time: float
    delta: float
    overshoot: float
    settling_time: float
    settled: bool
    drift_lag: float
    peak_sideslip: float
    carry: float


@dataclass(frozen=True)
class DeviationMetrics:
    max_dev: float
    mean_dev: float
    peak_overshoot: float
    settling_time: float
    offset: tuple
    turns: tuple

    def as_dict(self):
        return {
            "max_dev_mm": self.max_dev,
            "mean_dev_mm": self.mean_dev,
            "peak_overshoot_deg": self.peak_overshoot,
            "settling_time_s": self.settling_time,
            "registration_offset_mm": list(self.offset),
            "turns": [vars(turn) for turn in self.turns],
        }


def _degrees_between(a, b):
    """Signed angle a - b (rad in, deg out), wrapped into [-180, 180)."""

    return np.degrees(np.remainder(a - b + np.pi, 2 * np.pi) - np.pi)


def _integrate(values, t):
    return float(np.sum(0.5 * (values[1:] + values[:-1]) * np.diff(t)))


def turn_responses(traj, band=SETTLE_BAND):
    """Response of the heading and course to every commanded yaw change.

    - overshoot: peak heading excess (deg) past the new yaw, in the turn's
      direction, until the next command
    - settling_time: time (s) until the heading stays within `band` degrees
    - drift_lag: course error integrated over the window, divided by the
      turn; the time the swimmer effectively keeps going its old way
    - peak_sideslip: largest angle (deg) between heading and travel direction
    - carry: velocity (mm/s) across the new course, towards the old one, when
      the heading first reaches the new yaw
    """

    responses = []
    epochs = traj.epochs
    for k in range(1, len(epochs)):
        start, t0, yaw = epochs[k]
        delta = wrap_degrees(yaw - epochs[k - 1][2])
        if delta == 0:
            continue
        stop = epochs[k + 1][0] + 1 if k + 1 < len(epochs) else len(traj)
        t = traj.t[start:stop]
        gamma = math.radians(yaw)
        heading = traj.heading[start:stop]
        course = traj.course[start:stop]
        error = _degrees_between(heading, gamma)
        course_error = _degrees_between(gamma, course)
        sideslip = _degrees_between(heading, course)
        sign = math.copysign(1.0, delta)
        overshoot = max(0.0, float(np.max(sign * error)))
        reached = np.flatnonzero(sign * error >= 0)
        i = start + (int(reached[0]) if len(reached) else len(t) - 1)
        carry = sign * (traj.vx[i] * math.sin(gamma) - traj.vy[i] * math.cos(gamma))
        outside = np.flatnonzero(np.abs(error) > band)
        if len(outside) == 0:
            settling, settled = 0.0, True
        elif outside[-1] == len(t) - 1:
            settling, settled = float(t[-1] - t0), False
        else:
            settling, settled = float(t[outside[-1] + 1] - t0), True
        responses.append(
            TurnResponse(
                index=k,
                time=float(t0),
                delta=float(delta),
                overshoot=overshoot,
                settling_time=settling,
                settled=settled,
                drift_lag=_integrate(sign * course_error, t) / abs(delta),
                peak_sideslip=float(np.max(np.abs(sideslip))),
                carry=float(carry),
            )
        )
    return responses


def deviation_metrics(traj, target, registered=False, band=SETTLE_BAND):
    """Compare a run with its target polyline.

    Distances are plain point-to-polyline distances. With `registered` the
    run is first translated onto the target (see `register`), which leaves
    only its shape error.
    """

    if len(traj) < 2:
        raise InputError("trajectory", len(traj), "need at least two samples")
    vertices = np.asarray(target, dtype=float)
    points = traj.positions
    offset = register(points, vertices) if registered else np.zeros(2)
    distance = polyline_distance(points + offset, vertices)
    turns = turn_responses(traj, band)
    return DeviationMetrics(
        max_dev=float(np.max(distance)),
        mean_dev=float(np.mean(distance)),
        peak_overshoot=max((r.overshoot for r in turns), default=0.0),
        settling_time=max((r.settling_time for r in turns), default=0.0),
        offset=(float(offset[0]), float(offset[1])),
        turns=tuple(turns),
    )
