import numpy as np
import pytest

from kinematics.cable_kinematics import inverse_kinematics, jacobian
from mechanism.model import BodyInertia, Configuration
from statics.stiffness import cable_tensions, pretensioned_commands, stiffness_matrix, total_generalized_force
from statics.tension_solver import (
    distribute_tensions,
    generalized_load,
    solve_tensions,
    static_tensions,
)
from utils.errors import SingularityError

CENTER = Configuration.at([0.0, 0.0, 1.0], (0.1, 0.0))


def _without_preload(spec, gravity=True):
    spec = spec.with_spring("s", preload=0.0)
    if not gravity:
        spec = spec.with_updates(gravity=np.zeros(3))
    return spec


# -------------------------------------------------
# Generalized loads
# -------------------------------------------------
def test_zero_load_at_free_spring_without_gravity(screw):
    spec = _without_preload(screw.design, gravity=False)
    w = generalized_load(screw.geometry, spec, Configuration.at([0, 0, 1], (0.0, 0.0)))
    np.testing.assert_array_equal(w, np.zeros(8))


def test_gravity_load_at_center(screw):
    spec = _without_preload(screw.design)
    w = generalized_load(screw.geometry, spec, Configuration.at([0, 0, 1], (0.0, 0.0)))
    total_mass = sum(spec.masses[b].mass for b in spec.variant.bodies)
    assert w[2] == pytest.approx(-total_mass * 9.81)
    assert w[0] == pytest.approx(0.0, abs=1e-12)
    assert w[1] == pytest.approx(0.0, abs=1e-12)


def test_spring_entry_restores(screw):
    spec = _without_preload(screw.design, gravity=False)
    w = generalized_load(screw.geometry, spec, Configuration.at([0, 0, 1], (0.1, 0.0)))
    # 0.1 m of compression at 500 N/m pulls the bodies back together
    assert w[6] == pytest.approx(-50.0)
    assert abs(w[6]) == pytest.approx(50.0)


# -------------------------------------------------
# Unique tensions
# -------------------------------------------------
def test_centered_tensions_symmetric_and_feasible(screw):
    result = static_tensions(screw.geometry, screw.design, CENTER)
    t = result.tensions
    np.testing.assert_allclose(t[:4], t[0], rtol=1e-9)
    np.testing.assert_allclose(t[4:], t[4], rtol=1e-9)
    assert result.residual <= 1e-9
    assert result.feasible
    assert result.verdict == "feasible"


def test_zero_wrench_gives_zero_tensions(screw):
    J = jacobian(screw.geometry, screw.design, CENTER)
    result = solve_tensions(J, np.zeros(8), screw.design.tension_bounds)
    np.testing.assert_allclose(result.tensions, 0.0, atol=1e-12)
    assert result.verdict == "tension-low"
    assert result.low == list(range(8))


def test_outside_footprint_needs_pushing_cables(screw):
    q = Configuration.at([1.5, 0.0, 1.0], (0.1, 0.0))
    result = static_tensions(screw.geometry, screw.design, q)
    assert result.verdict == "tension-low"
    assert result.low
    assert all(result.tensions[i] < 5.0 for i in result.low)


def test_tensions_unique_across_factorizations(any_scenario):
    geometry, spec = any_scenario.geometry, any_scenario.design
    q = Configuration.at([0.05, -0.1, 1.05], any_scenario.simulation.working_internal)
    J = jacobian(geometry, spec, q)
    w = generalized_load(geometry, spec, q)
    lu = solve_tensions(J, w, method="lu")
    qr = solve_tensions(J, w, method="qr")
    assert lu.residual <= 1e-9
    assert qr.residual <= 1e-9
    np.testing.assert_allclose(lu.tensions, qr.tensions, atol=1e-9)


def test_singular_structure_matrix():
    J = np.eye(8)
    J[:, 7] = J[:, 6]
    with pytest.raises(SingularityError):
        solve_tensions(J, np.ones(8))


def test_feasibility_monotone_in_payload_mass(screw):
    spec = screw.design
    base = spec.masses["payload"]
    flags = []
    for mass in np.linspace(0.5, 20.0, 40):
        masses = dict(spec.masses)
        masses["payload"] = BodyInertia(float(mass), base.inertia)
        flags.append(static_tensions(screw.geometry, spec.with_updates(masses=masses), CENTER).feasible)
    assert flags[0]
    # once infeasible, heavier payloads stay infeasible
    first_bad = flags.index(False) if False in flags else len(flags)
    assert all(not f for f in flags[first_bad:])


# -------------------------------------------------
# Tension distribution
# -------------------------------------------------
def _planar_three_cables():
    u = np.array([[-1.0, 1.0], [0.0, 1.0], [1.0, 1.0]])
    return (u / np.linalg.norm(u, axis=1, keepdims=True)).T


def test_distribution_symmetric_for_symmetric_cables():
    A = _planar_three_cables()
    result = distribute_tensions(A, [0.0, 9.81], (0.1, 100.0))
    assert result.feasible
    assert result.tensions[0] == pytest.approx(result.tensions[2], abs=1e-8)
    assert result.kkt_residual <= 1e-8


def test_distribution_square_case_matches_unique_solve(screw):
    J = jacobian(screw.geometry, screw.design, CENTER)
    w = generalized_load(screw.geometry, screw.design, CENTER)
    unique = solve_tensions(J, w, screw.design.tension_bounds)
    result = distribute_tensions(J.T, w, screw.design.tension_bounds)
    assert result.feasible
    np.testing.assert_allclose(result.tensions, unique.tensions, atol=1e-6)


def test_distribution_matches_null_space_grid():
    A = _planar_three_cables()
    w = np.array([2.0, 15.0])
    lo, hi = 1.0, 50.0
    result = distribute_tensions(A, w, (lo, hi))
    assert result.feasible
    assert result.kkt_residual <= 1e-8

    # brute force over the one-dimensional null space
    particular = np.linalg.lstsq(A, w, rcond=None)[0]
    null = np.linalg.svd(A)[2][-1]
    lam = np.arange(-100.0, 100.0, 1e-4)
    candidates = particular[None, :] + lam[:, None] * null[None, :]
    ok = np.all((candidates >= lo) & (candidates <= hi), axis=1)
    objective = np.sum(candidates[ok] ** 2, axis=1)
    best = candidates[ok][np.argmin(objective)]

    np.testing.assert_allclose(result.tensions, best, atol=1e-3)
    assert result.objective <= objective.min() + 1e-9


def test_distribution_reports_infeasible():
    A = _planar_three_cables()
    result = distribute_tensions(A, [0.0, 500.0], (5.0, 10.0))
    assert result.status == "infeasible"
    assert result.tensions is None


def test_distribution_dimension_mismatch():
    with pytest.raises(ValueError):
        distribute_tensions(_planar_three_cables(), [1.0, 2.0, 3.0])


# -------------------------------------------------
# Cable model and stiffness
# -------------------------------------------------
def test_cable_tensions_are_unilateral():
    lengths = np.array([1.0, 1.0, 1.0])
    commanded = np.array([0.999, 1.0, 1.001])
    t = cable_tensions(lengths, commanded, 1e5, rates=np.array([-10.0, 0.0, 5.0]), damping=50.0)
    assert t[0] == 0.0  # taut but closing fast: never pushes
    assert t[1] == 0.0
    assert t[2] == 0.0  # slack


def test_stiffness_symmetric_positive_definite(screw):
    K = stiffness_matrix(screw.geometry, screw.design, CENTER, 1e5)
    np.testing.assert_allclose(K, K.T, rtol=1e-6, atol=1e-9)
    assert np.min(np.linalg.eigvalsh(K)) > 0.0


def test_stiffness_cable_part_scales_with_axial_stiffness(screw):
    geometry, spec = screw.geometry, screw.design
    pinned = inverse_kinematics(geometry, spec, CENTER)
    K0 = stiffness_matrix(geometry, spec, CENTER, 0.0, commanded=pinned)
    K1 = stiffness_matrix(geometry, spec, CENTER, 1e5, commanded=pinned)
    K2 = stiffness_matrix(geometry, spec, CENTER, 2e5, commanded=pinned)
    np.testing.assert_allclose(K2 - K0, 2.0 * (K1 - K0), rtol=1e-6, atol=1e-6 * np.abs(K1 - K0).max())
    J = jacobian(geometry, spec, CENTER)
    np.testing.assert_allclose(K1 - K0, 1e5 * J.T @ J, rtol=1e-5, atol=1e-5 * np.abs(K1 - K0).max())


def test_default_commands_are_in_equilibrium(screw):
    geometry, spec = screw.geometry, screw.design
    commanded = pretensioned_commands(geometry, spec, CENTER, 1e5)
    tensions = static_tensions(geometry, spec, CENTER).tensions
    np.testing.assert_allclose(inverse_kinematics(geometry, spec, CENTER) - commanded, tensions / 1e5, atol=1e-15)
    force = total_generalized_force(geometry, spec, CENTER, commanded, 1e5)
    assert np.max(np.abs(force)) <= 1e-8


def test_default_stiffness_carries_pretension(screw):
    geometry, spec = screw.geometry, screw.design
    K1 = stiffness_matrix(geometry, spec, CENTER, 1e5)
    K2 = stiffness_matrix(geometry, spec, CENTER, 2e5)
    pinned = stiffness_matrix(geometry, spec, CENTER, 1e5, commanded=inverse_kinematics(geometry, spec, CENTER))
    J = jacobian(geometry, spec, CENTER)
    # same static tensions at both stiffnesses: only the elastic part differs
    np.testing.assert_allclose(K2 - K1, 1e5 * J.T @ J, rtol=1e-5, atol=1e-5 * np.abs(K1).max())
    assert np.abs(K1 - pinned).max() > 1.0


def test_isolated_mechanism_spring(screw):
    spec = screw.design.with_updates(gravity=np.zeros(3))
    K = stiffness_matrix(screw.geometry, spec, CENTER, 0.0)
    assert K[6, 6] == pytest.approx(spec.springs["s"].stiffness, rel=1e-6)
    mask = np.ones((8, 8), dtype=bool)
    mask[6, 6] = False
    assert np.max(np.abs(K[mask])) <= 1e-9


def test_static_tensions_design_c(rotatable):
    q = Configuration.at([0.0, 0.0, 1.0], rotatable.simulation.working_internal)
    geometry, spec = rotatable.geometry, rotatable.design
    result = static_tensions(geometry, spec, q)
    t_min, t_max = spec.tension_bounds
    assert result.verdict == "feasible"
    assert np.all((result.tensions >= t_min) & (result.tensions <= t_max))
    w = generalized_load(geometry, spec, q)
    assert np.max(np.abs(jacobian(geometry, spec, q).T @ result.tensions - w)) <= 1e-9
    # the cable pattern is half-turn symmetric, so are the tensions
    np.testing.assert_allclose(result.tensions, result.tensions[[2, 3, 0, 1, 6, 7, 4, 5]], rtol=1e-9)
