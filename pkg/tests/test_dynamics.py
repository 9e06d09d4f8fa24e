import numpy as np
import pytest

from conftest import random_configuration
from kinematics.cable_kinematics import inverse_kinematics
from mechanism.chain import point_jacobian
from mechanism.model import Configuration
from motion.dynamics import (
    CableModel,
    SimState,
    energy,
    generalized_acceleration,
    hold_commands,
    mass_matrix,
    simulate,
    step_dynamics,
)
from utils.errors import DivergenceError

CENTER = Configuration.at([0.0, 0.0, 1.0], (0.1, 0.0))


def test_mass_matrix_is_symmetric_positive_definite(any_scenario):
    rng = np.random.default_rng(9)
    for _ in range(10):
        q = random_configuration(any_scenario.design, rng)
        M = mass_matrix(any_scenario.geometry, any_scenario.design, q)
        np.testing.assert_allclose(M, M.T, atol=1e-12)
        assert np.min(np.linalg.eigvalsh(M)) > 0.0


def test_free_fall_with_slack_cables(screw):
    geometry = screw.geometry
    spec = screw.design.with_spring("s", preload=0.0)
    cables = CableModel(damping=0.0)
    q = Configuration.at([0.0, 0.0, 1.0], (0.0, 0.0))
    slack = inverse_kinematics(geometry, spec, q) + 1.0
    a = generalized_acceleration(geometry, spec, SimState(q), slack, cables)

    masses = [spec.masses[b].mass for b in spec.variant.bodies]
    com = sum(m * point_jacobian(geometry, spec, q, b, np.zeros(3)) @ a for m, b in zip(masses, spec.variant.bodies))
    np.testing.assert_allclose(com / sum(masses), spec.gravity, atol=1e-12)
    np.testing.assert_allclose(a[6:], 0.0, atol=1e-12)

    nxt = step_dynamics(geometry, spec, SimState(q), slack, dt=1e-3, cables=cables)
    np.testing.assert_allclose(nxt.q.base_pose.position, [0.0, 0.0, 1.0 - 9.81e-6], atol=1e-12)


def test_hold_commands_keep_robot_still(screw):
    geometry, spec = screw.geometry, screw.design
    commanded = hold_commands(geometry, spec, CENTER)
    final = simulate(geometry, spec, SimState(CENTER), commanded, duration=1.0)
    assert final.t == pytest.approx(1.0)
    assert np.max(np.abs(CENTER.local_delta(final.q))) <= 1e-6


def test_energy_window_peaks_do_not_grow(screw):
    geometry, spec = screw.geometry, screw.design
    commanded = hold_commands(geometry, spec, CENTER)
    state = SimState(CENTER, v=[0.02, -0.01, 0.01, 0.0, 0.0, 0.05, 0.0, 0.0])
    window = 50
    values = []
    for _ in range(10 * window):
        state = step_dynamics(geometry, spec, state, commanded)
        values.append(energy(geometry, spec, state, commanded))
    peaks = np.max(np.reshape(values, (10, window)), axis=1)
    assert np.all(np.diff(peaks) <= 1e-9 * np.abs(peaks).max())


def test_integration_error_is_first_order(screw):
    geometry, spec = screw.geometry, screw.design
    commanded = hold_commands(geometry, spec, CENTER)
    start = SimState(CENTER, v=[0.05, 0.0, 0.02, 0.0, 0.0, 0.0, 0.0, 0.0])
    duration = 0.05

    def end_position(dt):
        return simulate(geometry, spec, start, commanded, duration, dt=dt).q.base_pose.position

    reference = end_position(1.5625e-5)
    coarse = np.linalg.norm(end_position(2.5e-4) - reference)
    fine = np.linalg.norm(end_position(1.25e-4) - reference)
    assert coarse / fine >= 1.8


def test_step_rejects_bad_input(screw):
    commanded = hold_commands(screw.geometry, screw.design, CENTER)
    with pytest.raises(ValueError):
        step_dynamics(screw.geometry, screw.design, SimState(CENTER), commanded, dt=0.0)
    bad = SimState(CENTER, v=[np.nan] * 8)
    with pytest.raises(DivergenceError):
        step_dynamics(screw.geometry, screw.design, bad, commanded)
