# File: src/mechanism/validation.py
# Purpose: Report-style scenario validation (counts, bounds, aperture monotonicity).

from typing import List

import numpy as np

from mechanism.maps import aperture_violations
from mechanism.model import N_CABLES, DesignSpec, RobotGeometry, Variant


def validate_scenario(geometry: RobotGeometry, spec: DesignSpec) -> List[str]:
    """Every invariant violation of a scenario; empty list iff the scenario is valid."""
    problems: List[str] = []
    variant = spec.variant

    # -------- geometry --------
    n_anchors = len(geometry.anchors)
    n_attach = len(geometry.attachments)
    if n_anchors != n_attach:
        problems.append("anchor/attachment count mismatch")
    if n_anchors != N_CABLES:
        problems.append(f"expected {N_CABLES} anchors, got {n_anchors}")
    if n_attach != N_CABLES:
        problems.append(f"expected {N_CABLES} attachments, got {n_attach}")
    for i, att in enumerate(geometry.attachments):
        if att.body not in variant.bodies:
            problems.append(f"attachment {i} references body '{att.body}' absent from {variant.value}")
    for body in variant.bodies:
        if body not in geometry.bodies:
            problems.append(f"missing collision shape for body '{body}'")
    for name, shape in geometry.bodies.items():
        if np.any(shape.half_extents <= 0):
            problems.append(f"body '{name}' box half extents must be positive")
    if geometry.rod_radius <= 0:
        problems.append("rod_radius must be positive")

    # -------- mechanism --------
    if variant in (Variant.A_SCREW, Variant.C_ROTATABLE_GRIPPER):
        if spec.lead is None or spec.lead <= 0:
            problems.append("lead must be positive")
    if variant is Variant.A_WINDER:
        if spec.winder is None:
            problems.append("winder parameters are required for A-winder")
        else:
            if spec.winder.theta_max <= 0:
                problems.append("theta_max must be positive")
            if spec.winder.stroke_period <= 0:
                problems.append("stroke_period must be positive")

    for name in variant.translational:
        limits = spec.stroke_limits.get(name)
        if limits is None:
            problems.append(f"missing stroke limits for '{name}'")
            continue
        s_min, s_max = limits
        if not s_min < s_max:
            problems.append(f"stroke limits for '{name}' need s_min < s_max")
        spring = spec.springs.get(name)
        if spring is None:
            problems.append(f"missing spring for '{name}'")
            continue
        if spring.stiffness <= 0:
            problems.append(f"spring '{name}' stiffness must be positive")
        if spring.free_extension <= spring.min_extension:
            problems.append(f"spring '{name}' free_extension must exceed min_extension")
        if spring.extension_at(s_max) < spring.min_extension:
            problems.append(f"spring '{name}' coil-binds inside the stroke")

    if variant in (Variant.B_GRIPPER, Variant.C_ROTATABLE_GRIPPER):
        if spec.aperture_map is None:
            problems.append(f"aperture_map is required for {variant.value}")
        else:
            problems.extend(aperture_violations(spec.aperture_map))

    # -------- loads --------
    t_min, t_max = spec.tension_bounds
    if t_min <= 0:
        problems.append("t_min must be positive")
    if t_max <= t_min:
        problems.append("t_max must exceed t_min")
    for body in variant.bodies:
        inertia = spec.masses.get(body)
        if inertia is None:
            problems.append(f"missing mass properties for body '{body}'")
            continue
        if inertia.mass <= 0:
            problems.append(f"mass of '{body}' must be positive")
        if not np.allclose(inertia.inertia, inertia.inertia.T):
            problems.append(f"inertia of '{body}' must be symmetric")
        elif np.min(np.linalg.eigvalsh(inertia.inertia)) <= 0:
            problems.append(f"inertia of '{body}' must be positive definite")
    if not np.all(np.isfinite(spec.gravity)):
        problems.append("gravity must be finite")

    return problems
