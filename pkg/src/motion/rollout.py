# File: src/motion/rollout.py
"""
Kinematic Rollout - length-only control of the cable robot.

Purpose:
    At every control tick t the configuration desired at t is turned into
    cable-length commands (inverse kinematics, optionally shortened by the
    model's static stretch) that the forward-dynamics simulator holds over the
    control period ending at t. Each log row is the state at t against the
    desired configuration at t. No tension or pose feedback is used anywhere.

Log columns:
    time, cmd_0..7, len_0..7, tension_0..7, tracking_error, verdict
"""

from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from kinematics.cable_kinematics import inverse_kinematics
from mechanism.maps import winder_reversals
from mechanism.model import N_CABLES, DesignSpec, RobotGeometry, Variant
from motion.dynamics import DT, CableModel, SimState, cable_state, step_dynamics
from motion.trajectory import Trajectory, sample, sample_times
from statics.tension_solver import static_tensions
from utils.config import progress_enabled
from utils.errors import SingularityError
from utils.run_logger import get_logger
from workspace.verdict_pipeline import VERDICT_CODES

logger = get_logger()

COLUMNS = (
    ["time"]
    + [f"cmd_{i}" for i in range(N_CABLES)]
    + [f"len_{i}" for i in range(N_CABLES)]
    + [f"tension_{i}" for i in range(N_CABLES)]
    + ["tracking_error", "verdict"]
)


@dataclass
class RolloutLog:
    frame: pd.DataFrame
    final_state: SimState

    @property
    def max_tracking_error(self) -> float:
        return float(self.frame["tracking_error"].max()) if len(self.frame) else 0.0

    @property
    def singular_ticks(self) -> List[int]:
        return self.frame.index[self.frame["verdict"] == VERDICT_CODES["singular"]].tolist()

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        self.frame.to_csv(path, index=False)
        return path

    def summary(self) -> dict:
        return {
            "ticks": int(len(self.frame)),
            "max_tracking_error": self.max_tracking_error,
            "final_tracking_error": float(self.frame["tracking_error"].iloc[-1]) if len(self.frame) else 0.0,
            "singular_ticks": self.singular_ticks,
            "verdict_counts": {
                name: int((self.frame["verdict"] == code).sum()) for name, code in VERDICT_CODES.items()
            },
        }


def _command(geometry, spec, q, cables: CableModel, compensate: bool):
    """Cable-length command and static verdict code for desired configuration q."""
    lengths = inverse_kinematics(geometry, spec, q)
    try:
        result = static_tensions(geometry, spec, q)
    except SingularityError:
        return lengths, VERDICT_CODES["singular"]
    if compensate:
        lengths = lengths - np.maximum(result.tensions, 0.0) / cables.stiffness
    return lengths, VERDICT_CODES[result.verdict]


def _crosses_reversal(spec: DesignSpec, s_prev: float, s_now: float) -> bool:
    if spec.variant is not Variant.A_WINDER:
        return False
    lo, hi = min(s_prev, s_now), max(s_prev, s_now)
    return bool(winder_reversals(spec.winder, lo, hi))


def kinematic_rollout(
    geometry: RobotGeometry,
    spec: DesignSpec,
    trajectory: Trajectory,
    control_period: float = 0.01,
    dt: float = DT,
    cables: CableModel = CableModel(),
    compensate: bool = True,
    initial: Optional[SimState] = None,
    progress: Optional[bool] = None,
) -> RolloutLog:
    """Feedforward length control along `trajectory`; raises DivergenceError on blow-up."""
    if control_period < dt:
        raise ValueError("control period must be at least one integration step")
    substeps = int(round(control_period / dt))
    q0, _, _ = sample(trajectory, 0.0)
    state = initial or SimState(q0)
    show = progress_enabled() if progress is None else progress

    rows = []
    times = sample_times(trajectory, control_period)
    logger.info(f"🚀 Rollout: {len(times)} ticks, {substeps} steps per tick")
    # the command in force over (t_prev, t] targets the configuration desired at t
    commanded, verdict = _command(geometry, spec, q0, cables, compensate)
    s_prev = q0.internal[0]
    for k in tqdm(range(len(times)), desc="Rollout", disable=not show):
        t = times[k]
        desired, _, _ = sample(trajectory, t)
        if k > 0:
            commanded, verdict = _command(geometry, spec, desired, cables, compensate)
            s_now = desired.internal[0]
            if _crosses_reversal(spec, s_prev, s_now):
                verdict = VERDICT_CODES["singular"]
            s_prev = s_now
            for _ in range(substeps):
                state = step_dynamics(geometry, spec, state, commanded, dt, cables)

        lengths, _, tensions, _ = cable_state(geometry, spec, state, commanded, cables)
        error = float(np.linalg.norm(state.q.base_pose.position - desired.base_pose.position))
        rows.append([t, *commanded, *lengths, *tensions, error, verdict])

    frame = pd.DataFrame(rows, columns=COLUMNS)
    singular = int((frame["verdict"] == VERDICT_CODES["singular"]).sum())
    if singular:
        logger.warning(f"⚠️ {singular} tick(s) at or across a winder reversal")
    logger.info(f"✅ Rollout complete: max tracking error {frame['tracking_error'].max():.3e} m")
    return RolloutLog(frame, state)
