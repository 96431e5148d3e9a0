"""Fit the thrust and fin-stiffness closure to the measured speed map.

Only the peak speed is a number; the rest of the target is the shape of the
map: speed rises then falls with frequency, peaking at the measured
frequency, rises with field strength everywhere, and the fin amplitude falls
with frequency. Shape violations enter the objective as squared hinges.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .actuation import steady_bending_amplitude
from .exceptions import CalibrationError
from .locomotion import steady_speed

logger = logging.getLogger(__name__)

# Fitted in log space, in this order, each pass
FITTED = ("hydro.thrust_coefficient", "actuation.stiffness", "actuation.damping")
ACCEPT = 1e-12
CONVERGED = 1e-8
PEAK_TOLERANCE = 0.02


@dataclass(frozen=True)
class SpeedMap:
    fields: tuple
    frequencies: tuple
    speed: np.ndarray
    beta: np.ndarray

    def speed_at(self, b, frequency):
        return float(
            self.speed[self.fields.index(b), self.frequencies.index(frequency)]
        )


def speed_map(config, fields=None, frequencies=None):
    """Steady speed (mm/s) and fin amplitude (rad) on a B x f grid, rows B."""

    fields = tuple(sorted(fields or config["drive.b_list"]))
    frequencies = tuple(sorted(frequencies or config["drive.f_list"]))
    fin, osc, hydro = config.magnetized_fin(), config.oscillator(), config.hydro()
    speed = np.zeros((len(fields), len(frequencies)))
    beta = np.zeros_like(speed)
    for i, b in enumerate(fields):
        for j, f in enumerate(frequencies):
            speed[i, j] = steady_speed(b, f, fin, osc, hydro)
            if f > 0:
                beta[i, j] = steady_bending_amplitude(fin, osc, b, f)
    return SpeedMap(fields, frequencies, speed, beta)


def _target_grid(config):
    fields = set(config["drive.b_list"]) | {config["calibration.peak_field"]}
    frequencies = set(config["drive.f_list"]) | {config["calibration.peak_frequency"]}
    return sorted(fields), sorted(frequencies)


def _shape_terms(config, grid):
    """Signed shortfalls, one per shape constraint; each must be < 0."""

    peak_row = grid.speed[grid.fields.index(config["calibration.peak_field"])]
    peak = grid.frequencies.index(config["calibration.peak_frequency"])
    terms = []
    for j in range(len(grid.frequencies) - 1):
        f0, f1 = grid.frequencies[j], grid.frequencies[j + 1]
        if j < peak:
            name = f"speed rises from {f0:g} to {f1:g} Hz"
            terms.append((name, peak_row[j] - peak_row[j + 1]))
        else:
            name = f"speed falls from {f0:g} to {f1:g} Hz"
            terms.append((name, peak_row[j + 1] - peak_row[j]))
    scale = config["calibration.peak_speed"]
    terms = [(name, value / scale) for name, value in terms]
    for j, f in enumerate(grid.frequencies):
        for i in range(len(grid.fields) - 1):
            terms.append(
                (
                    f"speed rises from {grid.fields[i]:g} to "
                    f"{grid.fields[i + 1]:g} mT at {f:g} Hz",
                    (grid.speed[i, j] - grid.speed[i + 1, j]) / scale,
                )
            )
    beta_scale = config["actuation.max_deflection"]
    for i, b in enumerate(grid.fields):
        for j in range(len(grid.frequencies) - 1):
            if grid.frequencies[j] == 0:
                continue
            terms.append(
                (
                    f"fin amplitude falls from {grid.frequencies[j]:g} to "
                    f"{grid.frequencies[j + 1]:g} Hz at {b:g} mT",
                    (grid.beta[i, j + 1] - grid.beta[i, j]) / beta_scale,
                )
            )
    return terms


def _peak_speed(config, grid):
    return grid.speed_at(
        config["calibration.peak_field"], config["calibration.peak_frequency"]
    )


def objective(config):
    fields, frequencies = _target_grid(config)
    grid = speed_map(config, fields, frequencies)
    target = config["calibration.peak_speed"]
    peak = _peak_speed(config, grid)
    penalty = sum(max(0.0, value) ** 2 for _, value in _shape_terms(config, grid))
    return ((peak - target) / target) ** 2 + config["calibration.penalty"] * penalty


def check_constraints(config):
    """Every violated constraint of `config`, as readable sentences."""

    fields, frequencies = _target_grid(config)
    grid = speed_map(config, fields, frequencies)
    violations = [name for name, value in _shape_terms(config, grid) if not value < 0]
    target = config["calibration.peak_speed"]
    peak = _peak_speed(config, grid)
    if abs(peak - target) > PEAK_TOLERANCE * target:
        violations.append(
            f"peak speed {peak:.3f} mm/s is not within "
            f"{PEAK_TOLERANCE:.0%} of {target:g} mm/s"
        )
    # The heading servo is validated, not fitted: the turn phenomenology
    # needs an underdamped response
    if not 0 < config["hydro.heading_damping"] < 1:
        violations.append("heading damping must be in (0, 1) for overshoot")
    return violations


@dataclass(frozen=True)
class CalibrationResult:
    config: object
    objective: float
    passes: int
    converged: bool

    @property
    def parameters(self):
        return fitted_parameters(self.config)


def fitted_parameters(config):
    """The closure constants a calibration settles.

    The remanence enters through the fin amplitude, so the thrust
    coefficient already lumps it.
    """

    return {
        "thrust_coefficient": config["hydro.thrust_coefficient"],
        "drag_coefficient": config["hydro.drag_coefficient"],
        "stiffness": config["actuation.stiffness"],
        "damping": config["actuation.damping"],
        "heading_frequency": config["hydro.heading_frequency"],
        "heading_damping": config["hydro.heading_damping"],
        "field_gain": config["hydro.field_gain"],
    }


def calibrate(config):
    """Coordinate descent over the log of each fitted constant.

    Every pass line-searches each constant within `calibration.span` (in
    log units) of its current value; a pass that improves the objective by
    less than 1e-8 ends the fit. Raises CalibrationError listing the
    violated constraints when the optimum still breaks any of them.
    """

    span = config["calibration.span"]
    current = config
    best = objective(current)
    passes, converged = 0, False
    while passes < config["calibration.max_passes"]:
        passes += 1
        start = best
        for key in FITTED:
            centre = math.log(current[key])

            def cost(log_value, key=key):
                return objective(current.with_values({key: math.exp(log_value)}))

            result = optimize.minimize_scalar(
                cost,
                bounds=(centre - span, centre + span),
                method="bounded",
                options={"xatol": 1e-10},
            )
            if result.fun < best - ACCEPT:
                current = current.with_values({key: math.exp(result.x)})
                best = float(result.fun)
        logger.debug("calibration pass %d: objective %.3e", passes, best)
        if start - best < CONVERGED:
            converged = True
            break
    if not converged:
        logger.warning("calibration stopped after %d passes", passes)

    violations = check_constraints(current)
    if violations:
        raise CalibrationError(violations)
    fitted = current.with_values({"calibration.fitted": True})
    logger.info("calibrated in %d passes, objective %.3e", passes, best)
    return CalibrationResult(fitted, best, passes, converged)
