from dataclasses import replace
from itertools import combinations

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from conftest import random_configuration
from mechanism.chain import attachment_points, body_pose, relative_transform
from mechanism.layouts import mirror_design_a_vertical, top_mounted_geometry
from mechanism.maps import (
    aperture_slope,
    aperture_violations,
    axial_contact_force,
    grasp_state,
    grip_aperture,
    screw_angle,
    spring_force,
    winder_angle,
    winder_reversals,
    winder_slope,
)
from mechanism.model import ApertureMap, Configuration, Pose, ScrewMap, WinderMap
from mechanism.validation import validate_scenario
from utils.errors import CoilBindError, StrokeError, UnknownBodyError


# -------------------------------------------------
# Screw and winder maps
# -------------------------------------------------
def test_screw_angle_values():
    screw = ScrewMap(0.05)
    assert screw_angle(screw, 0.0) == 0.0
    assert screw_angle(screw, 0.05) == pytest.approx(2 * np.pi, abs=1e-12)
    assert screw_angle(screw, 0.20) == pytest.approx(8 * np.pi, abs=1e-12)


def test_screw_angle_is_odd_and_linear():
    screw = ScrewMap(0.05)
    for a, b in [(0.013, 0.07), (-0.04, 0.11), (0.2, -0.05)]:
        assert screw_angle(screw, a + b) == pytest.approx(screw_angle(screw, a) + screw_angle(screw, b), abs=1e-12)
        assert screw_angle(screw, -a) == pytest.approx(-screw_angle(screw, a), abs=1e-12)


def test_winder_angle_endpoints_and_midpoint():
    winder = WinderMap(theta_max=2 * np.pi, stroke_period=0.1)
    assert winder_angle(winder, 0.0) == 0.0
    assert winder_angle(winder, 0.1) == pytest.approx(2 * np.pi)
    assert winder_angle(winder, 0.05) == pytest.approx(np.pi)
    assert winder_angle(winder, 0.15) == pytest.approx(np.pi)


def test_winder_slope_zero_only_at_reversals():
    winder = WinderMap(theta_max=2 * np.pi, stroke_period=0.1)
    assert winder_slope(winder, 0.0) == 0.0
    assert winder_slope(winder, 0.1) == 0.0
    assert winder_slope(winder, 0.03) == pytest.approx(20 * np.pi)
    assert winder_slope(winder, 0.13) == pytest.approx(-20 * np.pi)
    # reversals after wrap-around, where s % 2S is off by round-off
    assert 0.3 % 0.2 != 0.1
    assert winder_slope(winder, 0.3) == 0.0
    assert winder_slope(winder, 0.6) == 0.0
    assert winder_slope(winder, 0.35) == pytest.approx(-20 * np.pi)
    assert winder_reversals(winder, 0.0, 0.19) == pytest.approx([0.0, 0.1])


def test_winder_angle_is_lipschitz():
    winder = WinderMap(theta_max=2 * np.pi, stroke_period=0.1)
    s = np.linspace(-0.3, 0.5, 2001)
    values = np.array([winder_angle(winder, v) for v in s])
    rate = winder.theta_max / winder.stroke_period
    assert np.all(np.abs(np.diff(values)) <= rate * np.diff(s) + 1e-9)


# -------------------------------------------------
# Springs and contact force
# -------------------------------------------------
def test_spring_force_hooke(screw):
    spring = screw.design.springs["s"]
    assert spring_force(spring, spring.free_extension) == 0.0
    assert spring_force(spring, spring.free_extension - 0.1) == pytest.approx(50.0)
    with pytest.raises(CoilBindError):
        spring_force(spring, spring.min_extension - 1e-6)


def test_axial_contact_force_is_unilateral(screw):
    spring = replace(screw.design.springs["s"], preload=0.0)
    assert axial_contact_force(spring, 0.0) == 0.0
    assert axial_contact_force(spring, 0.1) == pytest.approx(50.0)
    assert axial_contact_force(spring, 0.1, external_load=60.0) == 0.0


# -------------------------------------------------
# Gripper aperture
# -------------------------------------------------
def test_aperture_table(gripper):
    spec = gripper.design
    assert grip_aperture(spec, 0.0) == 0.0
    assert grip_aperture(spec, 0.20) == pytest.approx(0.08)
    assert aperture_slope(spec, 0.10) == pytest.approx(0.08 / 0.15)
    with pytest.raises(StrokeError):
        grip_aperture(spec, 0.25)


def test_aperture_plateau_is_flat_and_grasp_robust(gripper):
    spec = gripper.design
    for s in (0.0, 0.01, 0.025, 0.04, 0.05):
        assert aperture_slope(spec, s) == 0.0
    # +/- 2 mm of spring-length error inside the plateau keeps the grasp
    nominal = 0.025
    for error in (-0.002, 0.0, 0.002):
        assert grasp_state(spec, nominal + error) == "closed"
    assert grasp_state(spec, 0.20) == "open"
    assert grasp_state(spec, 0.10) == "opening"


def test_aperture_violations_flag_closing_map():
    assert aperture_violations(ApertureMap((0.0, 0.1, 0.2), (0.0, 0.0, 0.08))) == []
    problems = aperture_violations(ApertureMap((0.0, 0.1, 0.2), (0.08, 0.0, 0.0)))
    assert "aperture_map must open monotonically with compression" in problems


# -------------------------------------------------
# Kinematic chain
# -------------------------------------------------
def test_upper_body_sits_at_nominal_spacing(screw):
    q = Configuration.at([0.0, 0.0, 0.0], (0.0, 0.0))
    pose = body_pose(screw.geometry, screw.design, q, "upper")
    np.testing.assert_allclose(pose.position, [0.0, 0.0, 0.10], atol=1e-12)
    np.testing.assert_allclose(pose.matrix, np.eye(3), atol=1e-12)


def test_one_lead_turns_payload_minus_one_revolution(screw):
    q = Configuration.at([0.0, 0.0, 0.0], (0.05, 0.0))
    rel = relative_transform(screw.geometry, screw.design, q, "payload")
    assert rel.yaw == pytest.approx(-2 * np.pi, abs=1e-12)


def test_half_lead_turns_gripper_half_revolution(rotatable):
    q = Configuration.at([0.0, 0.0, 1.0], (0.0, 0.025))
    pose = body_pose(rotatable.geometry, rotatable.design, q, "gripper")
    np.testing.assert_allclose(pose.matrix, Rotation.from_rotvec([0, 0, np.pi]).as_matrix(), atol=1e-12)


def test_body_pose_errors(screw):
    q = Configuration.at([0.0, 0.0, 1.0], (0.0, 0.0))
    with pytest.raises(UnknownBodyError):
        body_pose(screw.geometry, screw.design, q, "gripper")
    with pytest.raises(StrokeError) as info:
        body_pose(screw.geometry, screw.design, Configuration.at([0, 0, 1], (0.25, 0.0)), "upper")
    assert info.value.bound == "upper"
    assert info.value.limit == 0.20


def test_attachment_points_match_hand_composition(screw):
    s, psi = 0.07, 0.3
    q = Configuration.at([0.1, -0.2, 1.0], (s, psi))
    points = attachment_points(screw.geometry, screw.design, q)
    base = np.array([0.1, -0.2, 1.0])
    rz = Rotation.from_rotvec([0, 0, psi]).as_matrix()
    for i, att in enumerate(screw.geometry.attachments):
        if att.body == "upper":
            expected = base + np.array([0, 0, 0.10 + s]) + rz @ att.local
        else:
            expected = base + att.local
        np.testing.assert_allclose(points[i], expected, atol=1e-12)


def test_attachment_points_translate_rigidly(screw):
    q = Configuration.at([0.0, 0.0, 1.0], (0.1, 0.0))
    shifted = Configuration.at([0.0, 0.0, 1.25], (0.1, 0.0))
    delta = attachment_points(screw.geometry, screw.design, shifted) - attachment_points(
        screw.geometry, screw.design, q
    )
    np.testing.assert_allclose(delta, np.tile([0.0, 0.0, 0.25], (8, 1)), atol=1e-12)


def test_half_turn_permutes_attachment_points(screw):
    q = Configuration.at([0.0, 0.0, 1.0], (0.0, 0.0))
    turned = Configuration.at([0.0, 0.0, 1.0], (0.0, 0.0), yaw=np.pi)
    points = attachment_points(screw.geometry, screw.design, q)
    points_turned = attachment_points(screw.geometry, screw.design, turned)
    np.testing.assert_allclose(points_turned, points[[2, 3, 0, 1, 6, 7, 4, 5]], atol=1e-12)


def test_bodies_stay_rigid(any_scenario):
    geometry, spec = any_scenario.geometry, any_scenario.design
    rng = np.random.default_rng(3)
    for _ in range(20):
        q = random_configuration(spec, rng)
        points = attachment_points(geometry, spec, q)
        for i, j in combinations(range(8), 2):
            if geometry.attachments[i].body != geometry.attachments[j].body:
                continue
            local = np.linalg.norm(geometry.attachments[i].local - geometry.attachments[j].local)
            assert np.linalg.norm(points[i] - points[j]) == pytest.approx(local, abs=1e-12)
        for body in spec.variant.bodies:
            pose = body_pose(geometry, spec, q, body)
            assert abs(np.linalg.norm(pose.orientation) - 1.0) <= 1e-9


def test_pose_composition_is_associative():
    rng = np.random.default_rng(5)
    poses = [Pose.from_rotation(rng.normal(size=3), Rotation.from_rotvec(rng.normal(size=3))) for _ in range(3)]
    a, b, c = poses
    left = a.compose(b).compose(c)
    right = a.compose(b.compose(c))
    np.testing.assert_allclose(left.position, right.position, atol=1e-12)
    np.testing.assert_allclose(left.matrix, right.matrix, atol=1e-12)


def test_configuration_has_eight_coordinates(any_scenario):
    q = random_configuration(any_scenario.design, np.random.default_rng(0))
    assert q.local_delta(q).shape == (8,)
    assert len(any_scenario.geometry.attachments) == 8


# -------------------------------------------------
# Validation and layouts
# -------------------------------------------------
def test_canonical_scenarios_are_valid(any_scenario):
    assert validate_scenario(any_scenario.geometry, any_scenario.design) == []


def test_validation_reports_violations(screw):
    spec = screw.design.with_updates(tension_bounds=(0.0, 500.0))
    assert "t_min must be positive" in validate_scenario(screw.geometry, spec)

    geometry = screw.geometry.with_anchors(screw.geometry.anchors[:7])
    assert "anchor/attachment count mismatch" in validate_scenario(geometry, screw.design)


def test_mirrored_layout_swaps_rows(screw):
    mirrored = mirror_design_a_vertical(screw.geometry)
    np.testing.assert_allclose(mirrored.anchors[:4, 2], 0.0)
    np.testing.assert_allclose(mirrored.anchors[4:, 2], 2.0)
    assert mirrored.attachments[0].local[2] == pytest.approx(-0.03)
    twice = mirror_design_a_vertical(mirrored)
    np.testing.assert_allclose(twice.anchors, screw.geometry.anchors)
    assert validate_scenario(mirrored, screw.design) == []


def test_top_mounted_layout(screw):
    top = top_mounted_geometry(screw.geometry)
    np.testing.assert_allclose(top.anchors[:, 2], 2.0)
    np.testing.assert_allclose(top.anchors[:, :2], screw.geometry.anchors[:, :2])
