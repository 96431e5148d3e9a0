"""Planar swimming: flapping thrust against quadratic drag, and a heading
servo whose stiffness grows with the in-plane field.

Positions are mm, velocities mm/s, angles rad, field strengths mT. The
velocity is a vector, so during a turn the body keeps moving along its old
direction until drag and thrust bring it round.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .actuation import steady_bending_amplitude
from .exceptions import InputError
from .utils import wrap_angle

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HydroParams:
    """Closure coefficients.

    - mass: effective (added-mass included) body mass, kg
    - thrust_coefficient: C_t in T = C_t β² f², N·s²/rad²
    - drag_coefficient: C_d in D = C_d v², N·s²/mm²
    - heading_frequency: ω_ψ, rad/s per sqrt(gain·mT)
    - heading_damping: ζ of the heading servo, in (0, 1)
    - field_gain: g_B, 1/mT
    """

    mass: float = 2e-4
    thrust_coefficient: float = 6.9577e-6
    drag_coefficient: float = 2e-6
    heading_frequency: float = 3.0
    heading_damping: float = 0.1
    field_gain: float = 1.0

    def __post_init__(self):
        for name in (
            "mass",
            "thrust_coefficient",
            "drag_coefficient",
            "heading_frequency",
            "field_gain",
        ):
            if not getattr(self, name) > 0:
                raise InputError(name, getattr(self, name), "must be > 0")
        if not 0 < self.heading_damping < 1:
            raise InputError(
                "heading_damping", self.heading_damping, "must be in (0, 1)"
            )

    def heading_natural_frequency(self, b_xy):
        """Ω (rad/s) of the heading servo under an in-plane field of `b_xy` mT."""

        return self.heading_frequency * math.sqrt(self.field_gain * b_xy)

    def shaped_dwell(self, b_xy):
        """Half the damped period (s) of the heading servo.

        A turn split into two equal steps this far apart reaches the new yaw
        as the first step's overshoot peaks, and the second step cancels the
        ringing that would follow.
        """

        omega = self.heading_natural_frequency(b_xy)
        return math.pi / (omega * math.sqrt(1 - self.heading_damping**2))


@dataclass(frozen=True)
class BodyState:
    x: float
    y: float
    heading: float
    vx: float
    vy: float
    heading_rate: float = 0.0

    @property
    def speed(self):
        return math.hypot(self.vx, self.vy)

    @property
    def course(self):
        """Direction of travel (rad); equals the heading only in steady swimming."""

        return math.atan2(self.vy, self.vx)

    @classmethod
    def swimming(cls, heading, speed, x=0.0, y=0.0):
        return cls(x, y, heading, speed * math.cos(heading), speed * math.sin(heading))


def thrust(beta, frequency, p):
    """Mean flapping thrust (N), T = C_t β² f²."""

    if beta < 0 or frequency < 0:
        raise InputError("beta/frequency", (beta, frequency), "must be >= 0")
    return p.thrust_coefficient * beta**2 * frequency**2


def steady_speed(b, frequency, fin, osc, p):
    """Speed (mm/s) at which drag balances thrust, `b` in mT, `frequency` in Hz."""

    if b == 0 or frequency == 0:
        return 0.0
    beta = steady_bending_amplitude(fin, osc, b, frequency)
    return math.sqrt(thrust(beta, frequency, p) / p.drag_coefficient)


def overshoot_fraction(zeta):
    """Peak overshoot of an underdamped second-order step response."""

    return math.exp(-zeta * math.pi / math.sqrt(1 - zeta**2))


class Swimmer:
    """Fin actuation plus body hydrodynamics; everything `step_body` needs."""

    def __init__(self, fin, osc, hydro):
        self.fin = fin
        self.osc = osc
        self.hydro = hydro

    def steady_speed(self, b, frequency):
        return steady_speed(b, frequency, self.fin, self.osc, self.hydro)

    def thrust(self, b, frequency):
        if b == 0 or frequency == 0:
            return 0.0
        beta = steady_bending_amplitude(self.fin, self.osc, b, frequency)
        return thrust(beta, frequency, self.hydro)

    def _rates(self, gamma, b_xy, force):
        p = self.hydro
        omega = p.heading_natural_frequency(b_xy)
        stiffness = omega**2
        damping = 2 * p.heading_damping * omega
        # N/kg = m/s², positions are mm
        drag = p.drag_coefficient * 1e3 / p.mass
        push = force * 1e3 / p.mass

        def rates(s):
            x, y, psi, rate, vx, vy = s
            speed = math.hypot(vx, vy)
            return (
                vx,
                vy,
                rate,
                stiffness * wrap_angle(gamma - psi) - damping * rate,
                push * math.cos(psi) - drag * speed * vx,
                push * math.sin(psi) - drag * speed * vy,
            )

        return rates

    def integrator(self, gamma, b, frequency, b_z=None):
        """RK4 stepper `(tuple_state, dt) -> tuple_state` for a fixed command.

        State tuples are `(x, y, heading, heading_rate, vx, vy)`.
        """

        force = self.thrust(b if b_z is None else b_z, frequency)
        rates = self._rates(gamma, b, force)

        def advance(s, dt):
            k1 = rates(s)
            k2 = rates([a + dt / 2 * d for a, d in zip(s, k1)])
            k3 = rates([a + dt / 2 * d for a, d in zip(s, k2)])
            k4 = rates([a + dt * d for a, d in zip(s, k3)])
            return tuple(
                a + dt / 6 * (p + 2 * q + 2 * r + w)
                for a, p, q, r, w in zip(s, k1, k2, k3, k4)
            )

        return advance

    def step(self, state, gamma, b, frequency, dt, b_z=None):
        if not dt > 0:
            raise InputError("dt", dt, "must be > 0")
        advance = self.integrator(gamma, b, frequency, b_z)
        x, y, psi, rate, vx, vy = advance(
            (state.x, state.y, state.heading, state.heading_rate, state.vx, state.vy),
            dt,
        )
        return BodyState(x, y, wrap_angle(psi), vx, vy, rate)


def step_body(state, gamma, b, frequency, dt, swimmer):
    """Advance `state` by `dt` under commanded yaw `gamma` (rad) and field `b` mT."""

    return swimmer.step(state, gamma, b, frequency, dt)


@dataclass(frozen=True)
class TrajectoryRecord:
    """Sampled run. Arrays share one time base; `epochs` marks each commanded
    yaw change as `(sample_index, time_s, yaw_deg)`."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    heading: np.ndarray
    vx: np.ndarray
    vy: np.ndarray
    gamma: np.ndarray
    epochs: tuple

    @property
    def speed(self):
        return np.hypot(self.vx, self.vy)

    @property
    def course(self):
        return np.arctan2(self.vy, self.vx)

    @property
    def positions(self):
        return np.column_stack([self.x, self.y])

    def __len__(self):
        return len(self.t)


def simulate(
    swimmer,
    schedule,
    drive,
    dt=1e-3,
    start=(0.0, 0.0),
    sample_every=1,
    yaw_jitter=0.0,
    seed=0,
):
    """Run a yaw schedule open-loop.

    `schedule.segments` is a sequence of objects with `yaw` (deg), `amount` and
    `unit` (`"mm"` of travelled path or `"s"` of time). The swimmer starts in
    steady swimming along the first commanded yaw. `drive` supplies `b_xy`,
    `b_z` and `frequency`.
    """

    if not dt > 0:
        raise InputError("dt", dt, "must be > 0")
    segments = list(schedule.segments)
    if not segments:
        raise InputError("schedule", schedule, "has no segments")
    rng = np.random.default_rng(seed) if yaw_jitter > 0 else None

    yaws = [s.yaw + (rng.normal(0.0, yaw_jitter) if rng else 0.0) for s in segments]
    speed = swimmer.steady_speed(drive.b_z, drive.frequency)
    gamma0 = math.radians(yaws[0])
    vx, vy = speed * math.cos(gamma0), speed * math.sin(gamma0)
    s = (start[0], start[1], gamma0, 0.0, vx, vy)

    rows = [(0.0,) + s + (gamma0,)]
    epochs = []
    step = 0
    travelled = 0.0
    for segment, yaw in zip(segments, yaws):
        gamma = math.radians(yaw)
        epochs.append((len(rows) - 1, step * dt, yaw))
        advance = swimmer.integrator(gamma, drive.b_xy, drive.frequency, drive.b_z)
        timed = segment.unit == "s"
        remaining = int(round(segment.amount / dt)) if timed else 0
        goal = travelled + segment.amount
        while (remaining > 0) if timed else (travelled < goal):
            nxt = advance(s, dt)
            travelled += math.hypot(nxt[0] - s[0], nxt[1] - s[1])
            s = (nxt[0], nxt[1], wrap_angle(nxt[2])) + nxt[3:]
            step += 1
            remaining -= 1
            if step % sample_every == 0:
                rows.append((step * dt,) + s + (gamma,))
    if step % sample_every:
        rows.append((step * dt,) + s + (gamma,))
    logger.debug("simulated %d steps over %d segments", step, len(segments))

    data = np.array(rows)
    return TrajectoryRecord(
        t=data[:, 0],
        x=data[:, 1],
        y=data[:, 2],
        heading=data[:, 3],
        vx=data[:, 5],
        vy=data[:, 6],
        gamma=data[:, 7],
        epochs=tuple(epochs),
    )
