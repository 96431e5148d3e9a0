"""Magnetic force and torque on the front fins and the fin's bending response.

The fin is a single hinge at its root: J θ'' + c θ' + k θ = τ(t), driven by the
torque of the vertical sine field on the in-plane magnetization.
"""

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import InputError, StabilityWarning
from .utils import mt_to_t

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MagnetizedFin:
    volume: float
    remanence: float = 6e4
    direction: tuple = (0.0, 1.0, 0.0)

    def __post_init__(self):
        if not self.volume > 0:
            raise InputError("volume", self.volume, "must be > 0")
        if not self.remanence >= 0:
            raise InputError("remanence", self.remanence, "must be >= 0")
        if abs(float(np.linalg.norm(self.direction)) - 1.0) > 1e-12:
            raise InputError("direction", self.direction, "must be a unit vector")

    @property
    def magnetization(self):
        return self.remanence * np.asarray(self.direction, dtype=float)


@dataclass(frozen=True)
class FinOscillator:
    inertia: float
    damping: float
    stiffness: float
    max_deflection: float

    def __post_init__(self):
        for name in ("inertia", "damping", "stiffness"):
            if not getattr(self, name) > 0:
                raise InputError(name, getattr(self, name), "must be > 0")
        if not 0 < self.max_deflection < math.pi / 2:
            raise InputError(
                "max_deflection", self.max_deflection, "must be in (0, pi/2)"
            )

    @property
    def natural_frequency(self):
        """Undamped natural frequency in Hz."""

        return math.sqrt(self.stiffness / self.inertia) / (2 * math.pi)

    @property
    def damping_ratio(self):
        return self.damping / (2 * math.sqrt(self.stiffness * self.inertia))


def magnetic_torque(magnetization, field, volume):
    """τ = V (M × B); M in A/m, B in T, V in m³, τ in N·m.

        >>> magnetic_torque([1e5, 0, 0], [0, 5e-3, 0], 1e-9)
        <<< array([0.e+00, 0.e+00, 5.e-07])
    """

    return volume * np.cross(
        np.asarray(magnetization, dtype=float), np.asarray(field, dtype=float)
    )


def magnetic_force(magnetization, field_gradient, volume):
    """F_i = V Σ_j M_j ∂B_i/∂x_j, with `field_gradient[i][j]` = ∂B_i/∂x_j."""

    gradient = np.asarray(field_gradient, dtype=float)
    return volume * (gradient @ np.asarray(magnetization, dtype=float))


def fin_torque_amplitude(fin, b_z):
    """Small-angle torque amplitude τ₀ (N·m) of a vertical field `b_z` mT."""

    tau = magnetic_torque(fin.magnetization, [0.0, 0.0, mt_to_t(b_z)], fin.volume)
    return float(np.linalg.norm(tau))


def linear_bending_amplitude(fin, osc, b_z, frequency):
    """Steady-state hinge amplitude (rad) of the linear oscillator, unclamped."""

    if not frequency > 0:
        raise InputError("frequency", frequency, "must be > 0")
    omega = 2 * math.pi * frequency
    tau0 = fin_torque_amplitude(fin, b_z)
    return tau0 / math.hypot(
        osc.stiffness - osc.inertia * omega**2, osc.damping * omega
    )


def steady_bending_amplitude(fin, osc, b_z, frequency):
    """Bending amplitude β (rad): the linear amplitude, clamped at
    `max_deflection`."""

    linear = linear_bending_amplitude(fin, osc, b_z, frequency)
    return min(linear, osc.max_deflection)


def _fin_rate(osc, theta, omega, torque):
    return omega, (torque - osc.damping * omega - osc.stiffness * theta) / osc.inertia


def step_fin(state, torque_fn, t, dt, osc, frequency=None):
    """One RK4 step of the hinge ODE. `state` is `(theta, theta_dot)`."""

    if not dt > 0:
        raise InputError("dt", dt, "must be > 0")
    if frequency and dt >= 1 / (20 * frequency):
        warnings.warn(
            f"dt={dt:g}s resolves a {frequency:g} Hz drive with fewer than 20 "
            "steps per cycle",
            StabilityWarning,
            stacklevel=2,
        )
    theta, omega = state
    half = dt / 2
    k1 = _fin_rate(osc, theta, omega, torque_fn(t))
    k2 = _fin_rate(osc, theta + half * k1[0], omega + half * k1[1], torque_fn(t + half))
    k3 = _fin_rate(osc, theta + half * k2[0], omega + half * k2[1], torque_fn(t + half))
    k4 = _fin_rate(osc, theta + dt * k3[0], omega + dt * k3[1], torque_fn(t + dt))
    return (
        theta + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
        omega + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
    )


def fin_energy(state, osc):
    theta, omega = state
    return 0.5 * osc.inertia * omega**2 + 0.5 * osc.stiffness * theta**2


def simulate_fin(fin, osc, b_z, frequency, cycles=20, steps_per_cycle=1000):
    """Integrate the hinge from rest under a sinusoidal drive.

    Returns `(times, theta)` arrays including the initial state.
    """

    if not frequency > 0:
        raise InputError("frequency", frequency, "must be > 0")
    tau0 = fin_torque_amplitude(fin, b_z)
    omega = 2 * math.pi * frequency

    def torque(t):
        return tau0 * math.sin(omega * t)

    dt = 1 / (frequency * steps_per_cycle)
    n = cycles * steps_per_cycle
    theta = np.empty(n + 1)
    state = (0.0, 0.0)
    theta[0] = 0.0
    for i in range(n):
        state = step_fin(state, torque, i * dt, dt, osc, frequency)
        theta[i + 1] = state[0]
    logger.debug("fin simulated for %d cycles at %g Hz", cycles, frequency)
    return np.arange(n + 1) * dt, theta


def measured_amplitude(theta, steps_per_cycle):
    """Peak |θ| over the last full cycle of a simulated trace."""

    return float(np.max(np.abs(theta[-steps_per_cycle:])))


def simulate_hinges(
    fin, osc, b_z, frequency, phase_delay, cycles=20, steps_per_cycle=256
):
    """Front and rear hinge traces over the last cycle.

    The rear fin has no filler; it follows the front hinge through the shared
    elastomer joint, lagging by `phase_delay` radians of the drive.
    """

    times, front = simulate_fin(fin, osc, b_z, frequency, cycles, steps_per_cycle)
    lag = phase_delay / (2 * math.pi * frequency)
    rear = np.interp(times - lag, times, front, left=0.0)
    return front[-steps_per_cycle:], rear[-steps_per_cycle:]
