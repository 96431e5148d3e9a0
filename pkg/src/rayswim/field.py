"""Tri-axial Helmholtz coil model and the oscillating harmonic drive field.

Each coil pair is two ideal filament loops at the effective radius, spaced by
that radius. Fields come from a Biot-Savart sum around the loop; positions are
metres and fields tesla inside the kernels, millimetres and millitesla at the
public edges that say so.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InputError, SingularityError
from .utils import MU_0, mm_to_m, t_to_mt

logger = logging.getLogger(__name__)

DEFAULT_SEGMENTS = 720
# 1.2 mm enamelled copper
DEFAULT_WIRE_RADIUS = 0.6e-3
_CHUNK = 1024

# Cyclic permutations taking global coordinates into a frame whose z is the
# coil axis (`_TO_LOCAL`) and back (`_TO_GLOBAL`)
_TO_LOCAL = {"x": [1, 2, 0], "y": [2, 0, 1], "z": [0, 1, 2]}
_TO_GLOBAL = {"x": [2, 0, 1], "y": [1, 2, 0], "z": [0, 1, 2]}
AXES = ("x", "y", "z")


@dataclass(frozen=True)
class CoilAxis:
    axis: str
    turns: int
    resistance: float
    effective_radius: float
    inner_diameter: float
    outer_diameter: float

    def __post_init__(self):
        if self.axis not in AXES:
            raise InputError("axis", self.axis, "expected one of x, y, z")
        for name in ("turns", "resistance", "effective_radius"):
            if not getattr(self, name) > 0:
                raise InputError(name, getattr(self, name), "must be > 0")
        if not self.inner_diameter < self.outer_diameter:
            raise InputError(
                "inner_diameter", self.inner_diameter, "must be < outer_diameter"
            )

    @property
    def radius_m(self):
        return mm_to_m(self.effective_radius)

    @property
    def direction(self):
        return np.eye(3)[AXES.index(self.axis)]


def _default_axes():
    return (
        CoilAxis("x", 900, 14.38, 190.0, 324.0, 418.0),
        CoilAxis("y", 648, 7.83, 140.0, 230.0, 310.0),
        CoilAxis("z", 480, 4.23, 100.0, 140.0, 224.0),
    )


@dataclass(frozen=True)
class TriaxialCoil:
    axes: tuple = field(default_factory=_default_axes)

    def __post_init__(self):
        if tuple(a.axis for a in self.axes) != AXES:
            raise InputError(
                "axes", [a.axis for a in self.axes], "expected x, y, z in order"
            )
        outer = [a.outer_diameter for a in self.axes]
        if not outer[0] >= outer[1] >= outer[2]:
            raise InputError("outer_diameter", outer, "X must nest outside Y outside Z")

    def __getitem__(self, name):
        return self.axes[AXES.index(name)]


@dataclass(frozen=True)
class DriveSignal:
    """Oscillating harmonic field: static in-plane part plus a vertical sine.

    Strengths in mT, yaw in degrees, frequency in Hz, phase in radians.
    """

    b_xy: float
    yaw: float
    b_z: float
    frequency: float
    phase: float = 0.0

    def __post_init__(self):
        for name in ("b_xy", "b_z", "frequency"):
            if not getattr(self, name) >= 0:
                raise InputError(name, getattr(self, name), "must be >= 0")

    @property
    def pitch(self):
        """Peak elevation of the field above the OXY plane, in degrees."""

        if self.b_xy == 0:
            return 90.0 if self.b_z > 0 else 0.0
        return math.degrees(math.atan(self.b_z / self.b_xy))

    @classmethod
    def from_pitch(cls, b_xy, yaw, pitch, frequency, phase=0.0):
        return cls(b_xy, yaw, b_xy * math.tan(math.radians(pitch)), frequency, phase)


def _loop_kernel(radius, z_offset, points, segments):
    # Periodic rectangle rule around the loop; exact for on-axis points
    theta = 2 * np.pi * np.arange(segments) / segments
    source = np.column_stack(
        [radius * np.cos(theta), radius * np.sin(theta), np.full(segments, z_offset)]
    )
    dl = (2 * np.pi * radius / segments) * np.column_stack(
        [-np.sin(theta), np.cos(theta), np.zeros(segments)]
    )
    result = np.empty_like(points)
    for start in range(0, len(points), _CHUNK):
        r = points[start : start + _CHUNK, None, :] - source[None, :, :]
        norm3 = np.linalg.norm(r, axis=-1) ** 3
        result[start : start + _CHUNK] = np.sum(
            np.cross(dl[None, :, :], r) / norm3[..., None], axis=1
        )
    return result


def _check_wire_distance(radius, z_offset, points, wire_radius):
    rho = np.hypot(points[:, 0], points[:, 1])
    distance = np.hypot(rho - radius, points[:, 2] - z_offset)
    close = distance < wire_radius
    if np.any(close):
        first = int(np.argmax(close))
        raise SingularityError(points[first], float(distance[first]))


def loop_field(
    loop_radius,
    current,
    turns,
    point,
    segments=DEFAULT_SEGMENTS,
    z_offset=0.0,
    wire_radius=DEFAULT_WIRE_RADIUS,
):
    """Flux density (T) of an N-turn circular loop in a plane z = z_offset.

    `point` is a 3-vector or an `(..., 3)` array in metres; the result has
    the same shape.

        >>> loop_field(0.1, 1.0, 1, [0, 0, 0])
        <<< array([0.00000000e+00, 0.00000000e+00, 6.28318531e-06])
    """

    if not loop_radius > 0:
        raise InputError("loop_radius", loop_radius, "must be > 0")
    points = np.asarray(point, dtype=float)
    flat = points.reshape(-1, 3)
    _check_wire_distance(loop_radius, z_offset, flat, wire_radius)
    b = _loop_kernel(loop_radius, z_offset, flat, segments)
    b *= MU_0 * turns * current / (4 * np.pi)
    return b.reshape(points.shape)


def _pair_field_local(radius, turns, current, local_points, segments):
    b = _loop_kernel(radius, -radius / 2, local_points, segments)
    b += _loop_kernel(radius, radius / 2, local_points, segments)
    return b * (MU_0 * turns * current / (4 * np.pi))


def pair_field(
    axis, current, point, segments=DEFAULT_SEGMENTS, wire_radius=DEFAULT_WIRE_RADIUS
):
    """Field (T) of one Helmholtz pair centred on the origin.

    `point` in metres, shape `(3,)` or `(..., 3)`.
    """

    points = np.asarray(point, dtype=float)
    local = points.reshape(-1, 3)[:, _TO_LOCAL[axis.axis]]
    radius = axis.radius_m
    for z_offset in (-radius / 2, radius / 2):
        _check_wire_distance(radius, z_offset, local, wire_radius)
    b = _pair_field_local(radius, axis.turns, current, local, segments)
    return b[:, _TO_GLOBAL[axis.axis]].reshape(points.shape)


def center_field_constant(axis, segments=DEFAULT_SEGMENTS):
    """Centre field per ampere of a pair, in mT/A."""

    return float(t_to_mt(pair_field(axis, 1.0, np.zeros(3), segments)[
        AXES.index(axis.axis)
    ]))


def helmholtz_center_field(axis, current):
    """Closed-form centre field (T), mu0 (4/5)^(3/2) N I / R."""

    return MU_0 * (4 / 5) ** 1.5 * axis.turns * current / axis.radius_m


def current_for_field(axis, b_target, segments=DEFAULT_SEGMENTS):
    """Current (A) giving `b_target` mT at the pair centre; sign follows."""

    return b_target / center_field_constant(axis, segments)


def coil_power(axis, current):
    return current**2 * axis.resistance


def triaxial_field(
    coil, currents, point, segments=DEFAULT_SEGMENTS, wire_radius=DEFAULT_WIRE_RADIUS
):
    """Superposition of the three pairs. `currents` maps axis name to amps."""

    points = np.asarray(point, dtype=float)
    total = np.zeros(points.shape)
    for axis in coil.axes:
        current = currents.get(axis.axis, 0.0)
        if current:
            total = total + pair_field(axis, current, points, segments, wire_radius)
    return total


def oscillating_field(signal, t):
    """Instantaneous drive field in mT at time `t` (s).

        >>> oscillating_field(DriveSignal(4, 0, 4, 11), 0.0)
        <<< array([4., 0., 0.])
    """

    yaw = math.radians(signal.yaw)
    return np.array(
        [
            signal.b_xy * math.cos(yaw),
            signal.b_xy * math.sin(yaw),
            signal.b_z * math.sin(2 * math.pi * signal.frequency * t + signal.phase),
        ]
    )


def drive_currents(coil, signal, t, segments=DEFAULT_SEGMENTS):
    """Coil currents (A) reproducing `oscillating_field(signal, t)` at the centre."""

    b = oscillating_field(signal, t)
    return {
        axis.axis: current_for_field(axis, b[i], segments)
        for i, axis in enumerate(coil.axes)
    }


def field_scan(
    coil,
    currents,
    extent,
    step,
    segments=DEFAULT_SEGMENTS,
    wire_radius=DEFAULT_WIRE_RADIUS,
):
    """Total field over a cube of half-width `extent` mm sampled every `step` mm.

    Returns `(points_mm, b_mt)`, both `(n, 3)`, points ordered x-major.
    """

    if not step > 0:
        raise InputError("step", step, "must be > 0")
    ticks = np.arange(-math.floor(extent / step), math.floor(extent / step) + 1) * step
    grid = np.stack(np.meshgrid(ticks, ticks, ticks, indexing="ij"), axis=-1)
    points = grid.reshape(-1, 3)
    b = triaxial_field(coil, currents, mm_to_m(points), segments, wire_radius)
    return points, t_to_mt(b)


@dataclass(frozen=True)
class HomogeneityBox:
    tolerance: float
    dims: tuple
    per_axis: dict
    grid_step: float
    extent: float
    at_edge: bool

    @property
    def empty(self):
        return min(self.dims) == 0

    @property
    def axial_dims(self):
        """(Δx, Δy, Δz) mm, each along the axis of the pair that produces it."""

        return tuple(self.per_axis[name][AXES.index(name)] for name in AXES)


def _deviation_octant(axis, n, step_m, segments):
    """Relative deviation |B(p) - B(0)| / |B(0)| on the positive octant.

    The pair is axisymmetric, so the deviation only depends on the distance
    from the coil axis and the axial offset; it's evaluated once per distinct
    (rho, z) and scattered back onto the grid.
    """

    idx = np.arange(n + 1)
    rho2 = idx[:, None] ** 2 + idx[None, :] ** 2
    unique, inverse = np.unique(rho2, return_inverse=True)
    inverse = inverse.reshape(rho2.shape)
    rho = np.sqrt(unique) * step_m
    z = idx * step_m
    local = np.column_stack(
        [np.repeat(rho, len(z)), np.zeros(len(rho) * len(z)), np.tile(z, len(rho))]
    )
    radius = axis.radius_m
    with np.errstate(divide="ignore", invalid="ignore"):
        b = _pair_field_local(radius, axis.turns, 1.0, local, segments)
        b0 = _pair_field_local(radius, axis.turns, 1.0, np.zeros((1, 3)), segments)[0]
        deviation = np.hypot(b[:, 0], b[:, 2] - b0[2]) / abs(b0[2])
    deviation = np.where(np.isfinite(deviation), deviation, np.inf)
    table = deviation.reshape(len(rho), len(z))

    if axis.axis == "z":
        return table[inverse[:, :, None], idx[None, None, :]]
    if axis.axis == "x":
        return table[inverse[None, :, :], idx[:, None, None]]
    return table[inverse[:, None, :], idx[None, :, None]]


def _largest_box(deviation, tolerance, step):
    worst = deviation
    for dim in range(3):
        worst = np.maximum.accumulate(worst, axis=dim)
    idx = np.arange(worst.shape[0])
    volume = idx[:, None, None] * idx[None, :, None] * idx[None, None, :]
    volume = np.where(worst <= tolerance, volume, -1)
    best = np.unravel_index(int(np.argmax(volume)), volume.shape)
    if volume[best] <= 0:
        return (0.0, 0.0, 0.0), False
    at_edge = max(best) == worst.shape[0] - 1
    return tuple(2.0 * int(i) * step for i in best), at_edge


def homogeneity_volume(
    coil,
    currents=None,
    tolerance=0.01,
    grid_step=2.0,
    extent=None,
    segments=DEFAULT_SEGMENTS,
):
    """Largest origin-centred box (mm) where every grid point stays within
    `tolerance` of the centre field, for each single energized axis and for
    all of them at once.

    The deviation is relative, so the magnitude of each axis current only
    matters through its sign; an axis with zero current is left out.
    """

    if not 0 < tolerance < 1:
        raise InputError("tolerance", tolerance, "must be in (0, 1)")
    if not grid_step > 0:
        raise InputError("grid_step", grid_step, "must be > 0")
    if currents is None:
        currents = {name: 1.0 for name in AXES}
    if extent is None:
        extent = 0.9 * min(a.effective_radius for a in coil.axes)
    n = int(math.floor(extent / grid_step))

    per_axis = {}
    combined = None
    for axis in coil.axes:
        if not currents.get(axis.axis, 0.0):
            continue
        logger.debug("scanning %s pair on a %d^3 octant", axis.axis, n + 1)
        deviation = _deviation_octant(axis, n, mm_to_m(grid_step), segments)
        per_axis[axis.axis], _ = _largest_box(deviation, tolerance, grid_step)
        combined = deviation if combined is None else np.maximum(combined, deviation)
    if combined is None:
        raise InputError("currents", currents, "no axis is energized")

    dims, at_edge = _largest_box(combined, tolerance, grid_step)
    if at_edge:
        logger.warning(
            "%.0f%% box reaches the scan edge at %.1f mm, widen the extent",
            tolerance * 100,
            extent,
        )
    return HomogeneityBox(tolerance, dims, per_axis, grid_step, extent, at_edge)


def deviation_at(coil, axis_name, points_mm, segments=DEFAULT_SEGMENTS):
    """Relative deviation from the centre field of one pair at arbitrary points."""

    axis = coil[axis_name]
    b = pair_field(axis, 1.0, mm_to_m(np.asarray(points_mm, dtype=float)), segments)
    b0 = pair_field(axis, 1.0, np.zeros(3), segments)
    return np.linalg.norm(b - b0, axis=-1) / np.linalg.norm(b0)
