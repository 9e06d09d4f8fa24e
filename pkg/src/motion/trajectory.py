# File: src/motion/trajectory.py
# Purpose: Rest-to-rest quintic trajectories through configuration waypoints.

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial

from mechanism.chain import check_configuration
from mechanism.model import Configuration, DesignSpec
from utils.errors import InvalidWaypointError, StrokeError

# s(tau) with s(0)=0, s(1)=1 and zero first/second derivatives at both ends
QUINTIC = Polynomial([0.0, 0.0, 0.0, 10.0, -15.0, 6.0])
QUINTIC_D1 = QUINTIC.deriv(1)
QUINTIC_D2 = QUINTIC.deriv(2)


@dataclass(frozen=True)
class Trajectory:
    waypoints: Tuple[Configuration, ...]
    durations: Tuple[float, ...]
    deltas: Tuple[np.ndarray, ...]  # tangent of each segment

    @property
    def duration(self) -> float:
        return float(sum(self.durations))

    @property
    def breakpoints(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.durations)])


def plan_trajectory(
    waypoints: Sequence[Configuration],
    durations: Sequence[float],
    spec: Optional[DesignSpec] = None,
) -> Trajectory:
    """Quintic time scaling per segment along the retraction between waypoints."""
    waypoints = tuple(waypoints)
    durations = tuple(float(d) for d in durations)
    if len(waypoints) < 2:
        raise InvalidWaypointError("a trajectory needs at least two waypoints")
    if len(durations) != len(waypoints) - 1:
        raise InvalidWaypointError(
            f"{len(waypoints)} waypoints need {len(waypoints) - 1} segment durations, got {len(durations)}"
        )
    for i, d in enumerate(durations):
        if not np.isfinite(d) or d <= 0.0:
            raise InvalidWaypointError(f"segment {i} duration must be positive, got {d}")
    for i, q in enumerate(waypoints):
        if not np.all(np.isfinite(q.as_vector())):
            raise InvalidWaypointError(f"waypoint {i} has non-finite coordinates")
        if spec is not None:
            try:
                check_configuration(spec, q)
            except StrokeError as e:
                raise InvalidWaypointError(f"waypoint {i}: {e}")
    deltas = tuple(a.local_delta(b) for a, b in zip(waypoints, waypoints[1:]))
    return Trajectory(waypoints, durations, deltas)


def _segment(traj: Trajectory, t: float) -> Tuple[int, float]:
    t = min(max(t, 0.0), traj.duration)
    edges = traj.breakpoints
    index = int(np.searchsorted(edges, t, side="right") - 1)
    index = min(max(index, 0), len(traj.durations) - 1)
    return index, t - edges[index]


def sample(traj: Trajectory, t: float) -> Tuple[Configuration, np.ndarray, np.ndarray]:
    """(q, v, a) at time t; clamped to the first/last waypoint outside [0, T]."""
    index, local = _segment(traj, t)
    T = traj.durations[index]
    tau = local / T
    delta = traj.deltas[index]
    q = traj.waypoints[index].retract(QUINTIC(tau) * delta)
    v = QUINTIC_D1(tau) / T * delta
    a = QUINTIC_D2(tau) / T ** 2 * delta
    return q, v, a


def sample_times(traj: Trajectory, period: float) -> List[float]:
    n = int(np.floor(traj.duration / period + 1e-9))
    return [k * period for k in range(n + 1)]
