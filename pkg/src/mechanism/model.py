# File: src/mechanism/model.py
"""
Domain types for the reconfigurable-end-effector cable robot.

Poses store quaternions in scipy order (x, y, z, w). Every configuration has
eight coordinates: six for the reference-body pose plus two internal ones,
(s, psi) for designs A/B and (s1, s2) for design C.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.transform import Rotation

QUAT_TOL = 1e-9
N_CABLES = 8
N_COORDS = 8


class Variant(str, Enum):
    A_SCREW = "A-screw"
    A_WINDER = "A-winder"
    B_GRIPPER = "B-gripper"
    C_ROTATABLE_GRIPPER = "C-rotatable-gripper"

    @property
    def internal_names(self) -> Tuple[str, str]:
        if self is Variant.C_ROTATABLE_GRIPPER:
            return ("s1", "s2")
        return ("s", "psi")

    @property
    def bodies(self) -> Tuple[str, ...]:
        if self is Variant.C_ROTATABLE_GRIPPER:
            return ("upper", "middle", "lower", "gripper")
        if self is Variant.B_GRIPPER:
            return ("lower", "upper", "gripper")
        return ("lower", "upper", "payload")

    @property
    def reference_body(self) -> str:
        return "upper" if self is Variant.C_ROTATABLE_GRIPPER else "lower"

    @property
    def translational(self) -> Tuple[str, ...]:
        """Internal coordinates that carry a spring and a stroke."""
        if self is Variant.C_ROTATABLE_GRIPPER:
            return ("s1", "s2")
        return ("s",)


# -------------------------------------------------
# Rigid-body pose
# -------------------------------------------------
@dataclass(frozen=True)
class Pose:
    position: np.ndarray
    orientation: np.ndarray  # unit quaternion, (x, y, z, w)

    def __post_init__(self):
        position = np.asarray(self.position, dtype=float).reshape(3)
        quat = np.asarray(self.orientation, dtype=float).reshape(4)
        norm = np.linalg.norm(quat)
        if norm == 0.0 or not np.isfinite(norm):
            raise ValueError("orientation quaternion must be finite and non-zero")
        if abs(norm - 1.0) > QUAT_TOL:
            quat = quat / norm
        object.__setattr__(self, "position", position)
        object.__setattr__(self, "orientation", quat)

    @classmethod
    def identity(cls) -> "Pose":
        return cls(np.zeros(3), np.array([0.0, 0.0, 0.0, 1.0]))

    @classmethod
    def from_rotation(cls, position, rotation: Rotation) -> "Pose":
        return cls(position, rotation.as_quat())

    @classmethod
    def from_yaw(cls, position, yaw: float) -> "Pose":
        return cls.from_rotation(position, Rotation.from_rotvec([0.0, 0.0, yaw]))

    @property
    def rotation(self) -> Rotation:
        return Rotation.from_quat(self.orientation)

    @property
    def matrix(self) -> np.ndarray:
        return self.rotation.as_matrix()

    def compose(self, other: "Pose") -> "Pose":
        """self ∘ other: `other` expressed in this pose's frame."""
        rot = self.rotation
        return Pose.from_rotation(
            self.position + rot.apply(other.position), rot * other.rotation
        )

    def apply(self, points) -> np.ndarray:
        return self.position + self.rotation.apply(np.asarray(points, dtype=float))

    def inverse(self) -> "Pose":
        inv = self.rotation.inv()
        return Pose.from_rotation(-inv.apply(self.position), inv)


# -------------------------------------------------
# Mechanism parameters
# -------------------------------------------------
@dataclass(frozen=True)
class SpringParams:
    stiffness: float  # N/m
    free_extension: float  # m
    min_extension: float  # m, coil-bind limit
    preload: float = 0.0  # m of compression at zero internal coordinate

    def extension_at(self, s: float) -> float:
        return self.free_extension - self.preload - s


@dataclass(frozen=True)
class ScrewMap:
    lead: float  # m per revolution


@dataclass(frozen=True)
class WinderMap:
    theta_max: float  # rad
    stroke_period: float  # m, half of the groove period


@dataclass(frozen=True)
class ApertureMap:
    """Piecewise-linear gripper opening against stroke, breakpoints (s, g)."""

    stroke: Tuple[float, ...]
    aperture: Tuple[float, ...]

    @property
    def closure_breakpoint(self) -> float:
        """Largest stroke of the closed plateau that starts at the first breakpoint."""
        s_close = self.stroke[0]
        for s, g in zip(self.stroke, self.aperture):
            if g != self.aperture[0]:
                break
            s_close = s
        return s_close


@dataclass(frozen=True)
class BodyInertia:
    mass: float
    inertia: np.ndarray  # 3x3 about the body origin, body frame

    def __post_init__(self):
        object.__setattr__(self, "inertia", np.asarray(self.inertia, dtype=float).reshape(3, 3))


@dataclass(frozen=True)
class DesignSpec:
    variant: Variant
    springs: Dict[str, SpringParams]
    stroke_limits: Dict[str, Tuple[float, float]]
    tension_bounds: Tuple[float, float]
    masses: Dict[str, BodyInertia]
    gravity: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, -9.81]))
    lead: Optional[float] = None
    winder: Optional[WinderMap] = None
    aperture_map: Optional[ApertureMap] = None

    def __post_init__(self):
        object.__setattr__(self, "gravity", np.asarray(self.gravity, dtype=float).reshape(3))

    @property
    def t_min(self) -> float:
        return self.tension_bounds[0]

    @property
    def t_max(self) -> float:
        return self.tension_bounds[1]

    @property
    def screw(self) -> Optional[ScrewMap]:
        return ScrewMap(self.lead) if self.lead is not None else None

    def with_updates(self, **changes) -> "DesignSpec":
        return replace(self, **changes)

    def with_spring(self, name: str, **changes) -> "DesignSpec":
        springs = dict(self.springs)
        springs[name] = replace(springs[name], **changes)
        return replace(self, springs=springs)


# -------------------------------------------------
# Geometry
# -------------------------------------------------
@dataclass(frozen=True)
class Attachment:
    body: str
    local: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "local", np.asarray(self.local, dtype=float).reshape(3))


@dataclass(frozen=True)
class BodyShape:
    half_extents: np.ndarray  # axis-aligned box in body frame, m
    offset: float  # nominal axial offset from the reference body, m
    rod_tips: Tuple[np.ndarray, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "half_extents", np.asarray(self.half_extents, dtype=float).reshape(3))
        object.__setattr__(
            self, "rod_tips", tuple(np.asarray(p, dtype=float).reshape(3) for p in self.rod_tips)
        )


@dataclass(frozen=True)
class RobotGeometry:
    anchors: np.ndarray  # (8, 3)
    attachments: Tuple[Attachment, ...]
    bodies: Dict[str, BodyShape]
    rod_radius: float

    def __post_init__(self):
        object.__setattr__(self, "anchors", np.asarray(self.anchors, dtype=float).reshape(-1, 3))
        object.__setattr__(self, "attachments", tuple(self.attachments))

    def with_anchors(self, anchors) -> "RobotGeometry":
        return replace(self, anchors=np.asarray(anchors, dtype=float))

    def with_rod_radius(self, radius: float) -> "RobotGeometry":
        """Scale every attachment's radial distance so the rods reach `radius`."""
        scale = radius / self.rod_radius
        attachments = tuple(
            Attachment(a.body, np.array([a.local[0] * scale, a.local[1] * scale, a.local[2]]))
            for a in self.attachments
        )
        bodies = {
            name: replace(
                shape,
                rod_tips=tuple(np.array([p[0] * scale, p[1] * scale, p[2]]) for p in shape.rod_tips),
            )
            for name, shape in self.bodies.items()
        }
        return replace(self, attachments=attachments, bodies=bodies, rod_radius=radius)


# -------------------------------------------------
# Configuration
# -------------------------------------------------
@dataclass(frozen=True)
class Configuration:
    base_pose: Pose
    internal: Tuple[float, float]

    def __post_init__(self):
        internal = tuple(float(v) for v in self.internal)
        if len(internal) != 2:
            raise ValueError("configuration carries exactly two internal coordinates")
        object.__setattr__(self, "internal", internal)

    @classmethod
    def at(cls, position, internal=(0.0, 0.0), yaw: float = 0.0) -> "Configuration":
        return cls(Pose.from_yaw(position, yaw), tuple(internal))

    def retract(self, delta: Sequence[float]) -> "Configuration":
        """Move along an 8-vector tangent [dp (world), dtheta (body frame), d_internal]."""
        delta = np.asarray(delta, dtype=float).reshape(N_COORDS)
        rot = self.base_pose.rotation * Rotation.from_rotvec(delta[3:6])
        pose = Pose.from_rotation(self.base_pose.position + delta[:3], rot)
        internal = (self.internal[0] + delta[6], self.internal[1] + delta[7])
        return Configuration(pose, internal)

    def local_delta(self, other: "Configuration") -> np.ndarray:
        """Tangent taking self to other; inverse of retract."""
        rel = self.base_pose.rotation.inv() * other.base_pose.rotation
        return np.concatenate(
            [
                other.base_pose.position - self.base_pose.position,
                rel.as_rotvec(),
                np.subtract(other.internal, self.internal),
            ]
        )

    def as_vector(self) -> np.ndarray:
        """Position, rotation vector and internal coordinates (reporting only)."""
        return np.concatenate(
            [self.base_pose.position, self.base_pose.rotation.as_rotvec(), self.internal]
        )
