# File: src/kinematics/cable_kinematics.py
"""
Cable Kinematics - lengths, Jacobian, conditioning and singularities.

Purpose:
    Inverse kinematics (straight-line cable lengths), the analytic 8x8
    length Jacobian over the configuration tangent, a payload-angle variant of
    that Jacobian, Levenberg-Marquardt forward kinematics and the singularity
    scan used on planned paths.

Usage:
    lengths = inverse_kinematics(geometry, spec, q)
    q = forward_kinematics(geometry, spec, lengths, q0)
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from mechanism.chain import attachment_jacobians, attachment_points, check_configuration
from mechanism.maps import is_winder_reversal, rotation_coordinate, rotation_slope
from mechanism.model import N_COORDS, Configuration, DesignSpec, RobotGeometry, Variant
from utils.errors import ConvergenceError, SingularityError, StrokeError
from utils.run_logger import get_logger

logger = get_logger()

CHARACTERISTIC_LENGTH = 0.15  # m, rod radius of the canonical robot
SINGULARITY_THRESHOLD = 1e6
REVERSAL_TOL = 1e-9

# Levenberg-Marquardt settings
LM_DAMPING_INIT = 1e-3
LM_DAMPING_DOWN = 0.5
LM_DAMPING_UP = 4.0
LM_MAX_ITER = 100
LM_TOL = 1e-10

# forward-kinematics continuation and Newton polish
FK_STAGES = 4
FK_MAX_STAGES = 32
FK_STAGE_TOL = 1e-6
NEWTON_MAX_ITER = 20
NEWTON_STEP_TOL = 1e-12
NEWTON_FLOOR = 1e-10


# -------------------------------------------------
# Inverse kinematics
# -------------------------------------------------
def cable_vectors(
    geometry: RobotGeometry, spec: DesignSpec, q: Configuration, check: bool = True
) -> Tuple[np.ndarray, np.ndarray]:
    """Unit vectors attachment -> anchor (8, 3) and the cable lengths (8,)."""
    points = attachment_points(geometry, spec, q, check=check)
    spans = geometry.anchors - points
    lengths = np.linalg.norm(spans, axis=1)
    if np.any(lengths <= 0.0):
        raise SingularityError("attachment point coincides with its anchor")
    return spans / lengths[:, None], lengths


def inverse_kinematics(geometry: RobotGeometry, spec: DesignSpec, q: Configuration) -> np.ndarray:
    """Straight-line cable lengths (m); raises StrokeError for out-of-stroke q."""
    _, lengths = cable_vectors(geometry, spec, q)
    return lengths


# -------------------------------------------------
# Jacobian
# -------------------------------------------------
def jacobian(
    geometry: RobotGeometry,
    spec: DesignSpec,
    q: Configuration,
    coordinates: str = "internal",
    check: bool = True,
) -> np.ndarray:
    """d(length_i)/d(q_j) over the retraction tangent of Configuration.

    With coordinates="payload" the rotation-driving internal coordinate is
    replaced by the angle of the rotating body (payload or gripper). That
    column is infinite wherever the rotation map has zero slope.
    """
    if check:
        check_configuration(spec, q)
    units, _ = cable_vectors(geometry, spec, q, check=False)
    point_jacs = attachment_jacobians(geometry, spec, q)
    jac = np.array([-u @ pj for u, pj in zip(units, point_jacs)])
    if coordinates == "internal":
        return jac
    if coordinates == "payload":
        return _payload_columns(spec, q, jac)
    raise ValueError(f"unknown coordinate set '{coordinates}'")


def _payload_columns(spec: DesignSpec, q: Configuration, jac: np.ndarray) -> np.ndarray:
    if spec.variant is Variant.B_GRIPPER:
        raise ValueError("design B has no coupled rotation; use internal coordinates")
    idx = rotation_coordinate(spec)
    slope = rotation_slope(spec, q.internal[idx])
    task = jac.copy()
    with np.errstate(divide="ignore", invalid="ignore"):
        if spec.variant is Variant.C_ROTATABLE_GRIPPER:
            # gripper angle = phi(s2)
            task[:, 7] = _divide(jac[:, 7], slope)
        else:
            # payload angle = psi - phi(s): ds = (dpsi - dtheta) / phi'
            task[:, 6] = -_divide(jac[:, 6], slope)
            task[:, 7] = jac[:, 7] + _divide(jac[:, 6], slope)
    return task


def _divide(column: np.ndarray, slope: float) -> np.ndarray:
    if slope == 0.0:
        return np.where(column == 0.0, 0.0, np.inf)
    return column / slope


def rotational_columns(spec: DesignSpec) -> Tuple[int, ...]:
    """Columns carrying angles (m/rad entries) for the internal coordinate set."""
    if spec.variant is Variant.C_ROTATABLE_GRIPPER:
        return (3, 4, 5)
    return (3, 4, 5, 7)


# -------------------------------------------------
# Conditioning
# -------------------------------------------------
def condition_number(
    J: np.ndarray,
    scaling: float = CHARACTERISTIC_LENGTH,
    rotational: Optional[Sequence[int]] = None,
    spec: Optional[DesignSpec] = None,
) -> float:
    """2-norm condition number after dividing rotational columns by `scaling`.

    The rotational columns default to those of `spec` (rotational_columns), or
    to the reference-body rotation (3, 4, 5) when no design is given.

    Non-finite or rank-deficient matrices report +inf.
    """
    J = np.array(J, dtype=float)
    if not np.all(np.isfinite(J)):
        return float("inf")
    if rotational is None:
        rotational = rotational_columns(spec) if spec is not None else (3, 4, 5)
    cols = [c for c in rotational if c < J.shape[1]]
    J[:, cols] = J[:, cols] / scaling
    sv = np.linalg.svd(J, compute_uv=False)
    if sv[-1] <= sv[0] * np.finfo(float).eps:
        return float("inf")
    return float(sv[0] / sv[-1])


def configuration_condition(
    geometry: RobotGeometry,
    spec: DesignSpec,
    q: Configuration,
    scaling: float = CHARACTERISTIC_LENGTH,
) -> float:
    return condition_number(jacobian(geometry, spec, q), scaling, spec=spec)


def conditioning_sweep(
    geometry: RobotGeometry,
    spec: DesignSpec,
    q: Configuration,
    radii: Sequence[float],
    scaling: float = CHARACTERISTIC_LENGTH,
) -> List[Tuple[float, float]]:
    """(rod radius, condition number) pairs at a fixed configuration."""
    return [
        (float(r), configuration_condition(geometry.with_rod_radius(r), spec, q, scaling))
        for r in radii
    ]


# -------------------------------------------------
# Forward kinematics
# -------------------------------------------------
@dataclass
class ForwardResult:
    configuration: Configuration
    residual: float
    iterations: int
    stages: int = 1
    final_step: float = 0.0


def _residual(geometry, spec, q, lengths) -> np.ndarray:
    return inverse_kinematics(geometry, spec, q) - lengths


def _checked_jacobian(geometry, spec, q, threshold) -> np.ndarray:
    J = jacobian(geometry, spec, q)
    if condition_number(J, CHARACTERISTIC_LENGTH, spec=spec) > threshold:
        raise SingularityError("Jacobian singular at a forward-kinematics iterate")
    return J


def _levenberg_marquardt(geometry, spec, target, q, threshold, max_iter, tol):
    """Damped Newton on |IK(q) - target| from q; returns (q, residual, iterations)."""
    r = _residual(geometry, spec, q, target)
    damping = LM_DAMPING_INIT
    iterations = 0
    while np.max(np.abs(r)) > tol:
        if iterations >= max_iter:
            raise ConvergenceError("forward kinematics did not converge", float(np.max(np.abs(r))))
        iterations += 1
        J = _checked_jacobian(geometry, spec, q, threshold)
        step = np.linalg.solve(J.T @ J + damping * np.eye(N_COORDS), -(J.T @ r))
        try:
            candidate = q.retract(step)
            r_new = _residual(geometry, spec, candidate, target)
        except StrokeError:
            damping *= LM_DAMPING_UP
            continue
        if np.linalg.norm(r_new) < np.linalg.norm(r):
            q, r = candidate, r_new
            damping *= LM_DAMPING_DOWN
        else:
            damping *= LM_DAMPING_UP
    return q, r, iterations


def _newton_polish(geometry, spec, target, q, threshold):
    """Undamped Newton steps until the step norm reaches NEWTON_STEP_TOL.

    A step that stops shrinking below NEWTON_FLOOR is round-off and also ends
    the polish. Anything else is reported as non-convergence.
    """
    r = _residual(geometry, spec, q, target)
    previous = np.inf
    for _ in range(NEWTON_MAX_ITER):
        J = _checked_jacobian(geometry, spec, q, threshold)
        step = np.linalg.solve(J, -r)
        size = float(np.linalg.norm(step))
        if size <= NEWTON_STEP_TOL or (size <= NEWTON_FLOOR and size >= 0.5 * previous):
            return q, r, size
        q = q.retract(step)
        r = _residual(geometry, spec, q, target)
        previous = size
    raise ConvergenceError(f"Newton polish still stepping {previous:.3e} after {NEWTON_MAX_ITER} steps",
                           float(np.max(np.abs(r))))


def _continuation(geometry, spec, lengths, q0, stages, threshold, max_iter, tol):
    """Track the root connected to q0 while the targets move from IK(q0) to `lengths`."""
    start = inverse_kinematics(geometry, spec, q0)
    q = q0
    iterations = 0
    for k in range(1, stages + 1):
        target = start + (k / stages) * (lengths - start)
        stage_tol = tol if k == stages else FK_STAGE_TOL
        q, _, used = _levenberg_marquardt(geometry, spec, target, q, threshold, max_iter, stage_tol)
        iterations += used
    q, r, step = _newton_polish(geometry, spec, lengths, q, threshold)
    return q, r, step, iterations


def solve_forward(
    geometry: RobotGeometry,
    spec: DesignSpec,
    lengths: Sequence[float],
    q0: Configuration,
    threshold: float = SINGULARITY_THRESHOLD,
    max_iter: int = LM_MAX_ITER,
    tol: float = LM_TOL,
) -> ForwardResult:
    """Forward kinematics with diagnostics.

    The target lengths are approached in stages from IK(q0), each stage solved
    by Levenberg-Marquardt from the previous root, then the result is polished
    with undamped Newton steps. A failed attempt is re-seeded from q0 with twice
    as many stages; ConvergenceError is raised once FK_MAX_STAGES fails too.
    """
    lengths = np.asarray(lengths, dtype=float).reshape(-1)
    r0 = _residual(geometry, spec, q0, lengths)
    stages = 0 if np.max(np.abs(r0)) <= tol else FK_STAGES

    while True:
        try:
            if stages == 0:
                q, r, step = _newton_polish(geometry, spec, lengths, q0, threshold)
                iterations = 0
            else:
                q, r, step, iterations = _continuation(
                    geometry, spec, lengths, q0, stages, threshold, max_iter, tol
                )
            if np.max(np.abs(r)) > tol:
                raise ConvergenceError("forward kinematics residual above tolerance", float(np.max(np.abs(r))))
            break
        except (ConvergenceError, StrokeError) as e:
            if stages >= FK_MAX_STAGES:
                logger.warning(f"⚠️ Forward kinematics failed with {stages} stages: {e}")
                if isinstance(e, ConvergenceError):
                    raise
                raise ConvergenceError(f"forward kinematics left the stroke range: {e}", float("nan")) from e
            stages = max(FK_STAGES, 2 * stages)

    if spec.variant is Variant.A_WINDER and is_winder_reversal(spec.winder, q.internal[0], REVERSAL_TOL):
        raise SingularityError(f"winder reversal at s={q.internal[0]:.6g}: payload angle unobservable")
    return ForwardResult(q, float(np.max(np.abs(r))), iterations, max(stages, 1), step)


def forward_kinematics(
    geometry: RobotGeometry,
    spec: DesignSpec,
    lengths: Sequence[float],
    q0: Configuration,
    threshold: float = SINGULARITY_THRESHOLD,
) -> Configuration:
    """Configuration whose cable lengths match `lengths` to 1e-10 m, polished to a 1e-12 step."""
    return solve_forward(geometry, spec, lengths, q0, threshold).configuration


# -------------------------------------------------
# Singularities along paths
# -------------------------------------------------
def is_singular(
    geometry: RobotGeometry,
    spec: DesignSpec,
    q: Configuration,
    threshold: float = SINGULARITY_THRESHOLD,
    scaling: float = CHARACTERISTIC_LENGTH,
) -> bool:
    if spec.variant is Variant.A_WINDER and is_winder_reversal(spec.winder, q.internal[0], REVERSAL_TOL):
        return True
    if spec.variant is not Variant.B_GRIPPER:
        idx = rotation_coordinate(spec)
        if rotation_slope(spec, q.internal[idx]) == 0.0:
            return True
    return configuration_condition(geometry, spec, q, scaling) > threshold


def detect_singularities(
    geometry: RobotGeometry,
    spec: DesignSpec,
    path: Sequence[Configuration],
    threshold: float = SINGULARITY_THRESHOLD,
    scaling: float = CHARACTERISTIC_LENGTH,
) -> List[int]:
    """Indices of path samples that are ill-conditioned or sit on a winder reversal."""
    flagged = [i for i, q in enumerate(path) if is_singular(geometry, spec, q, threshold, scaling)]
    if flagged:
        logger.warning(f"⚠️ {len(flagged)} singular sample(s) on a path of {len(path)}")
    return flagged


def singular_regions(indices: Sequence[int]) -> List[Tuple[int, int]]:
    """Group flagged indices into inclusive runs of consecutive samples."""
    regions: List[Tuple[int, int]] = []
    for i in sorted(indices):
        if regions and i == regions[-1][1] + 1:
            regions[-1] = (regions[-1][0], i)
        else:
            regions.append((i, i))
    return regions


def payload_condition(
    geometry: RobotGeometry,
    spec: DesignSpec,
    q: Configuration,
    scaling: float = CHARACTERISTIC_LENGTH,
) -> Optional[float]:
    """Condition number of the payload-angle Jacobian (None for design B)."""
    if spec.variant is Variant.B_GRIPPER:
        return None
    return condition_number(jacobian(geometry, spec, q, "payload"), scaling, (3, 4, 5, 6, 7))
