import functools
import math
import re

import numpy as np

from rayswim.calibration import calibrate
from rayswim.config import ExperimentConfig
from rayswim.locomotion import TrajectoryRecord


def strip_leading_spaces(text):
    """Config text written inline in a test, de-indented to its first line."""

    lines = text.splitlines()
    margin = next(
        (len(re.match(r"\s*", line).group()) for line in lines if line.strip()),
        None,
    )
    if margin is None:
        raise ValueError("Text has no non-empty lines")
    for i, line in enumerate(lines):
        if line[:margin].strip():
            raise ValueError(f"Line {i + 1} is not indented properly")
    return "\n".join(line[margin:] for line in lines) + "\n"


@functools.lru_cache(maxsize=None)
def calibrated_config():
    return calibrate(ExperimentConfig()).config


def record_along(points, yaws, epochs=((0, 0.0, 0.0),), dt=0.1):
    """A TrajectoryRecord through `points` whose heading and velocity follow
    the path direction (radians in `yaws` per point)."""

    points = np.asarray(points, dtype=float)
    n = len(points)
    heading = np.asarray(yaws, dtype=float)
    return TrajectoryRecord(
        t=np.arange(n) * dt,
        x=points[:, 0],
        y=points[:, 1],
        heading=heading,
        vx=np.cos(heading),
        vy=np.sin(heading),
        gamma=heading.copy(),
        epochs=tuple(epochs),
    )


def polyline_points(vertices, spacing=0.5):
    """Points every `spacing` mm along a polyline, with per-point yaw."""

    points, yaws = [], []
    for a, b in zip(vertices[:-1], vertices[1:]):
        a, b = np.asarray(a, float), np.asarray(b, float)
        length = float(np.linalg.norm(b - a))
        steps = max(1, int(math.ceil(length / spacing)))
        yaw = math.atan2(b[1] - a[1], b[0] - a[0])
        for k in range(steps):
            points.append(a + (b - a) * k / steps)
            yaws.append(yaw)
    points.append(np.asarray(vertices[-1], float))
    yaws.append(yaws[-1])
    return np.array(points), np.array(yaws)
