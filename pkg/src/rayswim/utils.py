"""Unit conversions and small numeric helpers shared by the modules.

Geometry and trajectories are kept in millimetres and field strengths in
millitesla; the Biot-Savart and torque code works in SI. Conversions happen
here so that every module boundary states its unit.
"""

import math

import numpy as np

MU_0 = 4e-7 * math.pi


def mm_to_m(value):
    return np.asarray(value, dtype=float) * 1e-3 if _is_array(value) else value * 1e-3


def mt_to_t(value):
    return np.asarray(value, dtype=float) * 1e-3 if _is_array(value) else value * 1e-3


def t_to_mt(value):
    return np.asarray(value, dtype=float) * 1e3 if _is_array(value) else value * 1e3


def mm3_to_m3(value):
    return value * 1e-9


def wrap_angle(angle):
    """Wrap radians into (-pi, pi].

        >>> wrap_angle(3 * math.pi / 2)
        <<< -1.5707963267948966
        >>> wrap_angle(-math.pi)
        <<< 3.141592653589793
    """

    wrapped = math.remainder(angle, 2 * math.pi)
    if wrapped == -math.pi:
        return math.pi
    return wrapped


def wrap_degrees(angle):
    """Wrap degrees into (-180, 180]."""

    wrapped = math.remainder(angle, 360.0)
    if wrapped == -180.0:
        return 180.0
    return wrapped


def _is_array(value):
    return isinstance(value, (list, tuple, np.ndarray))
