# File: src/workspace/rotation.py
"""
Rotational workspace of the payload (design A) or gripper (designs B and C).

The internal coordinates are swept over a sample grid at a fixed base
position. Runs of neighbouring feasible samples are connected paths, so each
run contributes the arc of payload angles it covers; the arcs are merged into
disjoint intervals.
"""

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from mechanism.maps import rotation_angle, winder_reversals
from mechanism.model import Configuration, DesignSpec, RobotGeometry, Variant
from utils.errors import InfeasiblePoseError
from utils.run_logger import get_logger
from workspace.verdict_pipeline import evaluate_cell

logger = get_logger()


@dataclass
class RotationalWorkspace:
    intervals: List[Tuple[float, float]]
    samples: int
    feasible_samples: int
    continuous_rotation: bool = False
    sampled_angles: List[float] = field(default_factory=list, repr=False)

    @property
    def width(self) -> float:
        return float(sum(hi - lo for lo, hi in self.intervals))

    def to_dict(self) -> dict:
        return {
            "intervals": [list(iv) for iv in self.intervals],
            "width": self.width,
            "revolutions": self.width / (2.0 * np.pi),
            "continuous_rotation": self.continuous_rotation,
            "samples": self.samples,
            "feasible_samples": self.feasible_samples,
        }


def payload_angle(spec: DesignSpec, internal: Sequence[float], base_yaw: float = 0.0) -> float:
    """World yaw of the rotating end-effector body."""
    a, b = internal
    if spec.variant is Variant.C_ROTATABLE_GRIPPER:
        return base_yaw + rotation_angle(spec, b)
    if spec.variant is Variant.B_GRIPPER:
        return base_yaw + b
    return base_yaw + b - rotation_angle(spec, a)


def merge_intervals(arcs: Sequence[Tuple[float, float]], tol: float = 1e-12) -> List[Tuple[float, float]]:
    merged: List[Tuple[float, float]] = []
    for lo, hi in sorted(arcs):
        if merged and lo <= merged[-1][1] + tol:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def _runs(values: np.ndarray, ok: np.ndarray) -> List[Tuple[float, float]]:
    """Arcs covered by consecutive feasible samples along one sweep line."""
    arcs = []
    start = None
    for i in range(len(values) + 1):
        if i < len(values) and ok[i]:
            if start is None:
                start = i
        elif start is not None:
            run = values[start:i]
            arcs.append((float(run.min()), float(run.max())))
            start = None
    return arcs


def _sweep_axes(spec: DesignSpec, stroke_samples: int, psi_range: float, psi_samples: int, fixed: float):
    """Sample values of (internal[0], internal[1])."""
    if spec.variant is Variant.C_ROTATABLE_GRIPPER:
        lo, hi = spec.stroke_limits["s2"]
        return np.array([fixed]), np.linspace(lo, hi, stroke_samples)
    lo, hi = spec.stroke_limits["s"]
    psi = np.linspace(-psi_range, psi_range, psi_samples) if psi_samples > 1 else np.array([0.0])
    return np.linspace(lo, hi, stroke_samples), psi


def _continuous(spec: DesignSpec, first: np.ndarray, ok: np.ndarray) -> bool:
    """A full winder period is traversable along some feasible run of strokes."""
    if spec.variant is not Variant.A_WINDER:
        return False
    period = 2.0 * spec.winder.stroke_period
    for col in range(ok.shape[1]):
        for lo_s, hi_s in _runs(first, ok[:, col]):
            if hi_s - lo_s >= period - 1e-12:
                return True
    return False


def rotational_workspace(
    geometry: RobotGeometry,
    spec: DesignSpec,
    position: Sequence[float],
    clearance: float = 0.01,
    stroke_samples: int = 81,
    psi_range: float = 0.3,
    psi_samples: int = 7,
    fixed_internal: float = 0.1,
) -> RotationalWorkspace:
    """Payload angles reachable with feasible tensions and clearance at `position`.

    Design C sweeps s2 with s1 held at `fixed_internal`; designs A and B sweep
    s over its stroke and psi over [-psi_range, psi_range].
    """
    position = np.asarray(position, dtype=float)
    zero = tuple(spec.stroke_limits[name][0] for name in spec.variant.translational)
    if spec.variant is not Variant.C_ROTATABLE_GRIPPER:
        zero = (zero[0], 0.0)
    verdict, _ = evaluate_cell(geometry, spec, Configuration.at(position, zero), clearance, check_singularity=False)
    if verdict != "feasible":
        raise InfeasiblePoseError(f"base position {position.tolist()} is not statically feasible", verdict)

    first, second = _sweep_axes(spec, stroke_samples, psi_range, psi_samples, fixed_internal)
    ok = np.zeros((len(first), len(second)), dtype=bool)
    angles = np.zeros_like(ok, dtype=float)
    for i, a in enumerate(first):
        for j, b in enumerate(second):
            q = Configuration.at(position, (a, b))
            # reversals are passively traversable; only statics and clearance count here
            verdict, _ = evaluate_cell(geometry, spec, q, clearance, check_singularity=False)
            ok[i, j] = verdict == "feasible"
            angles[i, j] = payload_angle(spec, (a, b))

    arcs = []
    for j in range(len(second)):
        arcs.extend(_runs(angles[:, j], ok[:, j]))
    for i in range(len(first)):
        arcs.extend(_runs(angles[i, :], ok[i, :]))
    if spec.variant is Variant.A_WINDER:
        logger.info(f"🧭 Winder reversals in stroke: {winder_reversals(spec.winder, first[0], first[-1])}")

    result = RotationalWorkspace(
        intervals=merge_intervals(arcs),
        samples=int(ok.size),
        feasible_samples=int(ok.sum()),
        continuous_rotation=_continuous(spec, first, ok),
        sampled_angles=angles[ok].tolist(),
    )
    logger.info(
        f"🧭 Rotational workspace: {result.width:.3f} rad over {len(result.intervals)} interval(s), "
        f"{result.feasible_samples}/{result.samples} samples feasible"
    )
    return result
