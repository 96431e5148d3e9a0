import math
import warnings

import numpy as np
import pytest

from rayswim.actuation import (
    FinOscillator,
    MagnetizedFin,
    fin_energy,
    fin_torque_amplitude,
    linear_bending_amplitude,
    magnetic_force,
    magnetic_torque,
    measured_amplitude,
    simulate_fin,
    simulate_hinges,
    steady_bending_amplitude,
    step_fin,
)
from rayswim.exceptions import InputError, StabilityWarning
from rayswim.geometry import RobotGeometry, magnetized_volume
from rayswim.kinematics import phase_delay_check

FIN = MagnetizedFin(magnetized_volume(RobotGeometry()))
OSC = FinOscillator(
    inertia=3.6932e-10, damping=3.95e-8, stiffness=1.928e-6, max_deflection=0.6
)


def test_torque_and_force_match_componentwise_evaluation():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        m = rng.normal(size=3) * 1e5
        b = rng.normal(size=3) * 1e-2
        gradient = rng.normal(size=(3, 3))
        volume = rng.uniform(1e-10, 1e-8)
        expected_torque = volume * np.array(
            [
                m[1] * b[2] - m[2] * b[1],
                m[2] * b[0] - m[0] * b[2],
                m[0] * b[1] - m[1] * b[0],
            ]
        )
        expected_force = volume * np.array(
            [sum(m[j] * gradient[i][j] for j in range(3)) for i in range(3)]
        )
        scale = volume * np.linalg.norm(m)
        assert np.allclose(
            magnetic_torque(m, b, volume),
            expected_torque,
            rtol=1e-12,
            atol=1e-15 * scale * np.linalg.norm(b),
        )
        assert np.allclose(
            magnetic_force(m, gradient, volume),
            expected_force,
            rtol=1e-12,
            atol=1e-15 * scale * np.abs(gradient).max(),
        )


def test_parallel_field_gives_no_torque():
    m = np.array([1e5, -2e5, 3e5])
    torque = magnetic_torque(m, 2.5e-8 * m, 1e-9)
    assert np.linalg.norm(torque) <= 1e-12 * 1e-9 * np.linalg.norm(m) ** 2 * 2.5e-8


def test_uniform_field_gives_no_force():
    assert np.all(magnetic_force([1e5, 2e5, 0.0], np.zeros((3, 3)), 1e-9) == 0)


def test_torque_example():
    torque = magnetic_torque([1e5, 0, 0], [0, 5e-3, 0], 1e-9)
    assert torque == pytest.approx([0.0, 0.0, 5e-7])


def test_fin_torque_and_static_deflection():
    assert fin_torque_amplitude(FIN, 5.0) == pytest.approx(6.9984e-7)
    # Well below resonance the hinge follows the quasi-static τ/k
    assert linear_bending_amplitude(FIN, OSC, 5.0, 0.01) == pytest.approx(
        6.9984e-7 / 1.928e-6, rel=1e-4
    )


def test_oscillator_properties():
    assert OSC.natural_frequency == pytest.approx(11.5, rel=1e-3)
    assert OSC.damping_ratio == pytest.approx(0.74, rel=1e-3)


@pytest.mark.parametrize("frequency", [1.0, 7.0, 11.0, 15.0])
def test_time_domain_matches_closed_form(frequency):
    steps = 1000
    _, theta = simulate_fin(FIN, OSC, 1.0, frequency, cycles=20, steps_per_cycle=steps)
    expected = linear_bending_amplitude(FIN, OSC, 1.0, frequency)
    assert measured_amplitude(theta, steps) == pytest.approx(expected, rel=0.01)


@pytest.mark.parametrize("frequency", [1.0, 5.0, 11.0, 15.0])
def test_step_fin_settles_on_steady_amplitude_at_5_mt(frequency):
    steps = 1000
    tau0 = fin_torque_amplitude(FIN, 5.0)
    omega = 2 * math.pi * frequency
    dt = 1 / (frequency * steps)
    state = (0.0, 0.0)
    trace = []
    for i in range(20 * steps):
        state = step_fin(
            state, lambda t: tau0 * math.sin(omega * t), i * dt, dt, OSC, frequency
        )
        trace.append(state[0])
    expected = steady_bending_amplitude(FIN, OSC, 5.0, frequency)
    assert measured_amplitude(np.array(trace), steps) == pytest.approx(
        expected, rel=0.01
    )


def test_bending_falls_with_frequency():
    for b in (1.5, 2.25, 3.0, 4.0, 5.0):
        betas = [
            steady_bending_amplitude(FIN, OSC, b, f) for f in (1, 3, 5, 7, 11, 13, 15)
        ]
        assert all(x > y for x, y in zip(betas, betas[1:]))


def test_bending_rises_with_field_and_saturates():
    betas = [
        steady_bending_amplitude(FIN, OSC, b, 1.0) for b in (1.5, 2.25, 3.0, 4.0, 5.0)
    ]
    assert all(x < y for x, y in zip(betas, betas[1:]))
    assert betas[-1] == linear_bending_amplitude(FIN, OSC, 5.0, 1.0)
    assert steady_bending_amplitude(FIN, OSC, 1000.0, 1.0) == OSC.max_deflection


def test_coarse_step_warns():
    with pytest.warns(StabilityWarning):
        step_fin((0.0, 0.0), lambda t: 0.0, 0.0, 0.01, OSC, frequency=11.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        step_fin((0.0, 0.0), lambda t: 0.0, 0.0, 1e-4, OSC, frequency=11.0)


def test_free_oscillation_loses_energy():
    state = (0.1, 0.0)
    energy = fin_energy(state, OSC)
    for i in range(100):
        state = step_fin(state, lambda t: 0.0, i * 1e-4, 1e-4, OSC)
        assert fin_energy(state, OSC) < energy
        energy = fin_energy(state, OSC)


def test_rear_hinge_lags_by_the_phase_delay():
    front, rear = simulate_hinges(FIN, OSC, 3.0, 11.0, 0.5, steps_per_cycle=256)
    assert len(front) == len(rear) == 256
    assert phase_delay_check(front, rear) == pytest.approx(0.5, abs=2 * math.pi / 256)


def test_validation():
    with pytest.raises(InputError):
        MagnetizedFin(0.0)
    with pytest.raises(InputError):
        MagnetizedFin(1e-9, direction=(1.0, 1.0, 0.0))
    with pytest.raises(InputError):
        FinOscillator(1e-10, 1e-8, 1e-6, math.pi / 2)
    with pytest.raises(InputError):
        linear_bending_amplitude(FIN, OSC, 5.0, 0.0)
    with pytest.raises(InputError):
        step_fin((0.0, 0.0), lambda t: 0.0, 0.0, 0.0, OSC)
