# File: src/workspace/feasibility.py
"""
Wrench-Feasible Workspace - grid sampling of static feasibility.

Purpose:
    Run the cell verdict pipeline over every (position, base yaw) node of a
    WorkspaceGrid at fixed internal coordinates and collect the verdict codes.
    Results export to CSV (one row per cell) and JSON (grid metadata + codes).

Usage:
    wmap = wrench_feasible_workspace(geometry, spec, grid, internal=(0.1, 0.0))
    wmap.to_csv("workspace.csv")
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from kinematics.cable_kinematics import SINGULARITY_THRESHOLD
from mechanism.model import Configuration, DesignSpec, RobotGeometry
from utils.config import progress_enabled
from utils.run_logger import get_logger
from workspace.grid import WorkspaceGrid
from workspace.verdict_pipeline import VERDICT_CODES, VERDICT_NAMES, evaluate_cell

logger = get_logger()


@dataclass
class WorkspaceMap:
    grid: WorkspaceGrid
    internal: Tuple[float, float]
    verdicts: np.ndarray  # int codes, shape grid.shape

    def __post_init__(self):
        if self.verdicts.shape != self.grid.shape:
            raise ValueError(f"verdict array {self.verdicts.shape} does not match grid {self.grid.shape}")

    @property
    def feasible(self) -> np.ndarray:
        return self.verdicts == VERDICT_CODES["feasible"]

    @property
    def feasible_count(self) -> int:
        return int(np.count_nonzero(self.feasible))

    @property
    def volume(self) -> float:
        """Feasible cell count times the positional cell volume, averaged over yaw samples."""
        return self.feasible_count * self.grid.cell_volume / self.grid.yaw_count

    def verdict_at(self, index) -> str:
        return VERDICT_NAMES[int(self.verdicts[tuple(index)])]

    def counts(self) -> Dict[str, int]:
        return {name: int(np.count_nonzero(self.verdicts == code)) for name, code in VERDICT_CODES.items()}

    # -------- export --------
    def to_frame(self) -> pd.DataFrame:
        rows = []
        for index, position, yaw in self.grid.cells():
            code = int(self.verdicts[index])
            rows.append(
                {
                    "x": position[0],
                    "y": position[1],
                    "z": position[2],
                    "yaw": yaw,
                    "verdict": code,
                    "reason": VERDICT_NAMES[code],
                }
            )
        return pd.DataFrame(rows, columns=["x", "y", "z", "yaw", "verdict", "reason"])

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        self.to_frame().to_csv(path, index=False)
        return path

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.to_dict(),
            "internal": list(self.internal),
            "verdict_codes": VERDICT_CODES,
            "counts": self.counts(),
            "volume": self.volume,
            "verdicts": self.verdicts.reshape(-1).tolist(),
        }


def wrench_feasible_workspace(
    geometry: RobotGeometry,
    spec: DesignSpec,
    grid: WorkspaceGrid,
    internal: Sequence[float] = (0.1, 0.0),
    clearance: float = 0.01,
    threshold: float = SINGULARITY_THRESHOLD,
    progress: Optional[bool] = None,
) -> WorkspaceMap:
    """Static feasibility verdict of every grid cell (first failing check wins)."""
    internal = (float(internal[0]), float(internal[1]))
    verdicts = np.zeros(grid.shape, dtype=np.int8)
    show = progress_enabled() if progress is None else progress

    logger.info(f"📐 Sampling workspace: {grid.n_cells} cells, internal={internal}")
    for index, position, yaw in tqdm(
        grid.cells(), total=grid.n_cells, desc="Workspace cells", disable=not show
    ):
        q = Configuration.at(position, internal, yaw)
        verdict, _ = evaluate_cell(geometry, spec, q, clearance, threshold)
        verdicts[index] = VERDICT_CODES[verdict]

    wmap = WorkspaceMap(grid, internal, verdicts)
    logger.info(f"✅ Workspace complete: {wmap.feasible_count}/{grid.n_cells} feasible")
    return wmap


# -------------------------------------------------
# Symmetry of a workspace map
# -------------------------------------------------
def _symmetric_axes(grid: WorkspaceGrid) -> bool:
    return np.isclose(grid.x[0], -grid.x[1]) and np.isclose(grid.y[0], -grid.y[1])


def _image(kind: str, index, grid: WorkspaceGrid):
    """Grid index of the frame-symmetric cell.

    A frame rotation about z conjugates the end-effector orientation, which
    leaves its yaw unchanged; a vertical mirror reverses the yaw.
    """
    i, j, k, m = index
    nx, ny, _ = grid.resolution
    M = grid.yaw_count
    if kind == "mirror-x":
        return (nx - 1 - i, j, k, (-m) % M)
    if kind == "mirror-y":
        return (i, ny - 1 - j, k, (-m) % M)
    if kind == "half-turn":
        return (nx - 1 - i, ny - 1 - j, k, m)
    if kind == "quarter-turn":
        # (x, y) -> (-y, x); the alternating attachments have no matching cable permutation
        return (nx - 1 - j, i, k, m)
    raise ValueError(f"unknown symmetry '{kind}'")


def _applicable(kind: str, grid: WorkspaceGrid) -> bool:
    if not _symmetric_axes(grid):
        return False
    if kind == "quarter-turn":
        return grid.resolution[0] == grid.resolution[1] and np.isclose(grid.x[1], grid.y[1])
    return True


def symmetry_fraction(wmap: WorkspaceMap, kind: str) -> Optional[float]:
    """Share of cells whose verdict equals the verdict of their symmetric image."""
    grid = wmap.grid
    if not _applicable(kind, grid):
        return None
    matches = 0
    for index, _, _ in grid.cells():
        if wmap.verdicts[index] == wmap.verdicts[_image(kind, index, grid)]:
            matches += 1
    return matches / grid.n_cells


def symmetry_report(wmap: WorkspaceMap) -> Dict[str, Optional[float]]:
    """Verdict invariance under the frame symmetries (None where the grid does not allow it)."""
    return {
        kind: symmetry_fraction(wmap, kind)
        for kind in ("mirror-x", "mirror-y", "half-turn", "quarter-turn")
    }
