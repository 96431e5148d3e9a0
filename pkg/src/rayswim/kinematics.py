"""Pectoral fin surface: a rigid swing about the root line plus a travelling
wave that grows along the span and decays along the chord.

Coordinates on the fin are millimetres, `x` chordwise from the leading edge
and `y` spanwise from the body root.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import AnalysisError, InputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FinWaveParams:
    swing_amplitude: float
    oscillation_amplitude: float
    decay_rate: float
    wavenumber: float
    phase_delay: float
    angular_frequency: float
    chord: float = 9.66
    span: float = 9.72
    max_swing: float = math.pi / 2

    def __post_init__(self):
        if not 0 <= self.swing_amplitude <= self.max_swing:
            raise InputError(
                "swing_amplitude", self.swing_amplitude, "must be in [0, max_swing]"
            )
        if not 0 <= self.phase_delay <= math.pi:
            raise InputError("phase_delay", self.phase_delay, "must be in [0, pi]")
        for name in ("oscillation_amplitude", "decay_rate"):
            if not getattr(self, name) >= 0:
                raise InputError(name, getattr(self, name), "must be >= 0")
        for name in ("chord", "span"):
            if not getattr(self, name) > 0:
                raise InputError(name, getattr(self, name), "must be > 0")

    @property
    def period(self):
        return 2 * math.pi / self.angular_frequency


def _check_planform(x, y, p):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any((x < 0) | (x > p.chord)):
        raise InputError("x", x, f"outside the chord [0, {p.chord}] mm")
    if np.any((y < 0) | (y > p.span)):
        raise InputError("y", y, f"outside the span [0, {p.span}] mm")
    return x, y


def fin_surface(x, y, t, p):
    """Vertical displacement z (mm) of the fin at `(x, y)` and time `t`.

    Accepts scalars or broadcastable arrays.

        >>> p = FinWaveParams(0.3, 0.5, 0.1, 0.3, 0.0, 2 * math.pi * 11)
        >>> fin_surface(4.0, 0.0, 0.01, p)
        <<< 0.0
    """

    x, y = _check_planform(x, y, p)
    omega_t = p.angular_frequency * np.asarray(t, dtype=float)
    swing = y * np.tan(p.swing_amplitude * np.sin(omega_t))
    wave = (
        p.oscillation_amplitude
        * (y / p.span)
        * np.exp(-p.decay_rate * x)
        * np.sin(p.wavenumber * x - omega_t + p.phase_delay)
    )
    z = swing + wave
    return float(z) if np.ndim(z) == 0 else z


def surface_envelope(x, y, p):
    """Upper bound of |z| over a period: swing reach plus the wave envelope."""

    x, y = _check_planform(x, y, p)
    envelope = y * math.tan(p.swing_amplitude) + p.oscillation_amplitude * (
        y / p.span
    ) * np.exp(-p.decay_rate * x)
    return float(envelope) if np.ndim(envelope) == 0 else envelope


def surface_grid(p, nx=21, ny=21, nt=16):
    """Sample one period of the surface; returns an `(n, 4)` array of
    `(x, y, t, z)` rows ordered t-major."""

    xs = np.linspace(0.0, p.chord, nx)
    ys = np.linspace(0.0, p.span, ny)
    ts = np.arange(nt) * p.period / nt
    t, x, y = np.meshgrid(ts, xs, ys, indexing="ij")
    z = fin_surface(x, y, t, p)
    return np.column_stack([x.ravel(), y.ravel(), t.ravel(), z.ravel()])


def advance_per_cycle(speed, frequency):
    """Distance Δs (mm) covered per flapping cycle."""

    if not frequency > 0:
        raise InputError("frequency", frequency, "must be > 0")
    return speed / frequency


def phase_delay_check(front_trace, rear_trace):
    """Phase (rad, in (-pi, pi]) by which `rear_trace` lags `front_trace`.

    Both traces must sample exactly one or more whole periods; the lag is the
    peak of their circular cross-correlation, so it's resolved to one sample.
    """

    front = np.asarray(front_trace, dtype=float)
    rear = np.asarray(rear_trace, dtype=float)
    if front.shape != rear.shape or front.ndim != 1:
        raise AnalysisError("traces must be 1-d and of equal length")
    if len(front) < 4:
        raise AnalysisError("need at least 4 samples per trace")
    for name, trace in (("front", front), ("rear", rear)):
        # A whole-period window closes on itself: the wrap-around step is no
        # bigger than the steps inside the window
        interior = np.max(np.abs(np.diff(trace)))
        if abs(trace[0] - trace[-1]) > 2 * interior + 1e-12:
            raise AnalysisError(f"{name} trace does not wrap around periodically")
    front = front - front.mean()
    rear = rear - rear.mean()
    scale = np.linalg.norm(front) * np.linalg.norm(rear)
    if scale == 0:
        raise AnalysisError("a trace is constant, there is no phase to measure")

    correlation = np.fft.irfft(
        np.conj(np.fft.rfft(front)) * np.fft.rfft(rear), n=len(front)
    )
    lag = int(np.argmax(correlation))
    if correlation[lag] / scale < 0.5:
        raise AnalysisError(
            "traces are not periodic over the window (peak correlation "
            f"{correlation[lag] / scale:.2f})"
        )
    phase = 2 * math.pi * lag / len(front)
    return phase - 2 * math.pi if phase > math.pi else phase
