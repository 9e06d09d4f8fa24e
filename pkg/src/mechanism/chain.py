# File: src/mechanism/chain.py
"""
Kinematic chain of the three end-effector designs.

Every body sits on the reference body's axis: relative to the reference it is
an axial translation t(internal) followed by a yaw a(internal). That single
shape covers all variants, so positions, point Jacobians and angular-velocity
Jacobians are computed by the same code.

    A (screw / winder): upper = ref · Tz(off + s) · Rz(psi)
                        payload = ref · Tz(off) · Rz(psi - phi(s))
    B (gripper):        upper = ref · Tz(off + s) · Rz(psi)
                        gripper = ref · Tz(off) · Rz(psi)
    C (rotatable):      middle = ref · Tz(off - s2), lower = ref · Tz(off - s1)
                        gripper = ref · Tz(off - s2) · Rz(phi(s2))
"""

from dataclasses import dataclass
from typing import Dict, List

import numpy as np
from scipy.spatial.transform import Rotation

from mechanism.maps import check_stroke, rotation_angle, rotation_slope
from mechanism.model import (
    N_COORDS,
    Configuration,
    DesignSpec,
    Pose,
    RobotGeometry,
    Variant,
)
from utils.errors import UnknownBodyError

E_Z = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class RelativeTransform:
    translation: np.ndarray  # in the reference frame
    yaw: float
    d_translation: np.ndarray  # (3, 2) w.r.t. internal coordinates
    d_yaw: np.ndarray  # (2,)


def _rz(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def check_configuration(spec: DesignSpec, q: Configuration) -> None:
    for name, value in zip(spec.variant.internal_names, q.internal):
        check_stroke(spec, name, value)


def relative_transform(
    geometry: RobotGeometry, spec: DesignSpec, q: Configuration, body: str
) -> RelativeTransform:
    variant = spec.variant
    if body not in variant.bodies or body not in geometry.bodies:
        raise UnknownBodyError(f"body '{body}' does not exist in design {variant.value}")
    offset = geometry.bodies[body].offset
    a, b = q.internal
    dt = np.zeros((3, 2))
    dyaw = np.zeros(2)
    translation = np.array([0.0, 0.0, offset])
    yaw = 0.0

    if variant is Variant.C_ROTATABLE_GRIPPER:
        s1, s2 = a, b
        if body == "middle":
            translation[2] -= s2
            dt[2, 1] = -1.0
        elif body == "lower":
            translation[2] -= s1
            dt[2, 0] = -1.0
        elif body == "gripper":
            translation[2] -= s2
            dt[2, 1] = -1.0
            yaw = rotation_angle(spec, s2)
            dyaw[1] = rotation_slope(spec, s2)
    else:
        s, psi = a, b
        if body == "upper":
            translation[2] += s
            dt[2, 0] = 1.0
            yaw = psi
            dyaw[1] = 1.0
        elif body == "payload":
            # shaft angle relative to the lower body: psi - phi(s)
            yaw = psi - rotation_angle(spec, s)
            dyaw[0] = -rotation_slope(spec, s)
            dyaw[1] = 1.0
        elif body == "gripper":
            yaw = psi
            dyaw[1] = 1.0
    return RelativeTransform(translation, yaw, dt, dyaw)


def body_pose(
    geometry: RobotGeometry,
    spec: DesignSpec,
    q: Configuration,
    body: str,
    check: bool = True,
) -> Pose:
    """World pose of a body; raises StrokeError / UnknownBodyError."""
    if check:
        check_configuration(spec, q)
    rel = relative_transform(geometry, spec, q, body)
    local = Pose.from_rotation(rel.translation, Rotation.from_rotvec([0.0, 0.0, rel.yaw]))
    return q.base_pose.compose(local)


def body_poses(
    geometry: RobotGeometry, spec: DesignSpec, q: Configuration, check: bool = True
) -> Dict[str, Pose]:
    if check:
        check_configuration(spec, q)
    return {
        name: body_pose(geometry, spec, q, name, check=False) for name in spec.variant.bodies
    }


def attachment_points(
    geometry: RobotGeometry, spec: DesignSpec, q: Configuration, check: bool = True
) -> np.ndarray:
    """World coordinates (8, 3) of the cable attachment points."""
    poses = body_poses(geometry, spec, q, check=check)
    return np.array([poses[att.body].apply(att.local) for att in geometry.attachments])


# -------------------------------------------------
# First-order kinematics of points fixed to bodies
# -------------------------------------------------
def point_jacobian(
    geometry: RobotGeometry,
    spec: DesignSpec,
    q: Configuration,
    body: str,
    local: np.ndarray,
) -> np.ndarray:
    """(3, 8) derivative of a body-fixed point's world position.

    Columns follow the tangent of Configuration.retract: world translation,
    body-frame rotation of the reference body, then the two internal coordinates.
    """
    rel = relative_transform(geometry, spec, q, body)
    R = q.base_pose.matrix
    rotated_local = _rz(rel.yaw) @ np.asarray(local, dtype=float)
    c = rel.translation + rotated_local
    jac = np.zeros((3, N_COORDS))
    jac[:, 0:3] = np.eye(3)
    jac[:, 3:6] = -R @ _skew(c)
    for j in range(2):
        jac[:, 6 + j] = R @ (rel.d_translation[:, j] + rel.d_yaw[j] * np.cross(E_Z, rotated_local))
    return jac


def angular_jacobian(
    geometry: RobotGeometry, spec: DesignSpec, q: Configuration, body: str
) -> np.ndarray:
    """(3, 8) world angular velocity of a body per unit generalized velocity."""
    rel = relative_transform(geometry, spec, q, body)
    R = q.base_pose.matrix
    jac = np.zeros((3, N_COORDS))
    jac[:, 3:6] = R
    axis = R @ E_Z
    for j in range(2):
        jac[:, 6 + j] = rel.d_yaw[j] * axis
    return jac


def attachment_jacobians(
    geometry: RobotGeometry, spec: DesignSpec, q: Configuration
) -> List[np.ndarray]:
    return [point_jacobian(geometry, spec, q, att.body, att.local) for att in geometry.attachments]


def _skew(v: np.ndarray) -> np.ndarray:
    return np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])
