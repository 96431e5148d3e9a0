"""Robot dimensions, the NACA 4-digit body profile and the magnetized volume.

All lengths are millimetres. `magnetized_volume` is the only function that
leaves the module in SI (cubic metres), because it feeds the torque and force
expressions directly.
"""

import logging
import re
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InputError
from .utils import mm3_to_m3

logger = logging.getLogger(__name__)

# Standard 4-digit thickness polynomial, open trailing edge
_THICKNESS_COEFFICIENTS = (0.2969, -0.1260, -0.3516, 0.2843, -0.1015)


@dataclass(frozen=True)
class Fin:
    width: float
    length: float
    thickness: float

    def __post_init__(self):
        for name in ("width", "length", "thickness"):
            if not getattr(self, name) > 0:
                raise InputError(f"fin.{name}", getattr(self, name), "must be > 0")

    @property
    def volume_mm3(self):
        return self.width * self.length * self.thickness


@dataclass(frozen=True)
class RobotGeometry:
    """Dimensions of the swimmer (mm), defaults from the built prototype."""

    body_length: float = 11.34
    body_width: float = 2.0
    body_height: float = 1.5
    overall_width: float = 20.56
    front_fin: Fin = field(default_factory=lambda: Fin(9.72, 1.0, 0.12))
    rear_fin: Fin = field(default_factory=lambda: Fin(9.41, 8.66, 0.12))

    def __post_init__(self):
        for name in ("body_length", "body_width", "body_height", "overall_width"):
            if not getattr(self, name) > 0:
                raise InputError(name, getattr(self, name), "must be > 0")
        # Fins overlap the body edge, so only the body itself has to fit
        if self.overall_width < self.body_width:
            raise InputError(
                "overall_width", self.overall_width, "must be >= body_width"
            )


def _parse_naca4(code):
    if not isinstance(code, str) or not re.fullmatch(r"\d{4}", code):
        raise InputError("code", code, "expected 4 decimal digits")
    camber = int(code[0]) / 100
    camber_position = int(code[1]) / 10
    thickness = int(code[2:]) / 100
    return camber, camber_position, thickness


def _stations(chord, n_points, spacing):
    if not chord > 0:
        raise InputError("chord", chord, "must be > 0")
    if n_points < 2:
        raise InputError("n_points", n_points, "need at least 2 stations")
    if spacing == "linear":
        unit = np.linspace(0.0, 1.0, n_points)
    elif spacing == "cosine":
        unit = 0.5 * (1.0 - np.cos(np.linspace(0.0, np.pi, n_points)))
    else:
        raise InputError("spacing", spacing, "expected 'linear' or 'cosine'")
    return unit


def _half_thickness(unit, thickness):
    a0, a1, a2, a3, a4 = _THICKNESS_COEFFICIENTS
    return (thickness / 0.2) * (
        a0 * np.sqrt(unit) + a1 * unit + a2 * unit**2 + a3 * unit**3 + a4 * unit**4
    )


def _camber(unit, camber, position):
    """Mean camber line and its slope, in chord units."""

    if camber == 0 or position == 0:
        return np.zeros_like(unit), np.zeros_like(unit)
    front = unit < position
    y_c = np.where(
        front,
        camber / position**2 * (2 * position * unit - unit**2),
        camber
        / (1 - position) ** 2
        * (1 - 2 * position + 2 * position * unit - unit**2),
    )
    slope = np.where(
        front,
        2 * camber / position**2 * (position - unit),
        2 * camber / (1 - position) ** 2 * (position - unit),
    )
    return y_c, slope


def naca4_thickness_profile(code, chord, n_points, spacing="linear"):
    """Half-thickness distribution of a NACA 4-digit section.

    Returns an `(n_points, 2)` array of `(x, half_thickness)` pairs in the
    units of `chord`, with `x` strictly increasing from 0 to `chord`.

        >>> profile = naca4_thickness_profile("0018", 11.34, 101)
        >>> profile[:, 1].max() / 11.34
        <<< 0.0900...
    """

    _, _, thickness = _parse_naca4(code)
    unit = _stations(chord, n_points, spacing)
    return np.column_stack([unit * chord, _half_thickness(unit, thickness) * chord])


def naca4_camber_line(code, chord, n_points, spacing="linear"):
    """Mean camber line `(x, y_c)`; identically zero for symmetric sections."""

    camber, position, _ = _parse_naca4(code)
    unit = _stations(chord, n_points, spacing)
    y_c, _ = _camber(unit, camber, position)
    return np.column_stack([unit * chord, y_c * chord])


def naca4_surface(code, chord, n_points, spacing="cosine"):
    """Upper and lower surface coordinates, each an `(n_points, 2)` array."""

    camber, position, thickness = _parse_naca4(code)
    unit = _stations(chord, n_points, spacing)
    y_t = _half_thickness(unit, thickness)
    y_c, slope = _camber(unit, camber, position)
    theta = np.arctan(slope)
    upper = np.column_stack([unit - y_t * np.sin(theta), y_c + y_t * np.cos(theta)])
    lower = np.column_stack([unit + y_t * np.sin(theta), y_c - y_t * np.cos(theta)])
    return upper * chord, lower * chord


def magnetized_volume(geometry):
    """Volume of the two magnetized front fins in m³.

    Each fin is a laser-cut flat film, taken as a box; the rear fins carry no
    magnetic filler and don't count.
    """

    return mm3_to_m3(2 * geometry.front_fin.volume_mm3)


def body_lengths_per_second(speed, geometry):
    return speed / geometry.body_length
