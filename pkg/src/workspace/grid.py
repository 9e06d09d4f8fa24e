# File: src/workspace/grid.py
# Purpose: Sampling grid of the wrench-feasible workspace (positions x base yaw).

from dataclasses import dataclass
from itertools import product
from typing import Iterator, Optional, Tuple

import numpy as np


@dataclass(frozen=True)
class WorkspaceGrid:
    x: Tuple[float, float]
    y: Tuple[float, float]
    z: Tuple[float, float]
    resolution: Tuple[int, int, int] = (21, 21, 11)
    yaw_count: int = 8

    def __post_init__(self):
        if any(n < 1 for n in self.resolution) or self.yaw_count < 1:
            raise ValueError("grid resolution and yaw_count must be at least 1")
        for name in ("x", "y", "z"):
            lo, hi = getattr(self, name)
            if hi < lo:
                raise ValueError(f"grid range {name} is reversed")

    def axis(self, index: int) -> np.ndarray:
        lo, hi = (self.x, self.y, self.z)[index]
        n = self.resolution[index]
        if n == 1:
            return np.array([0.5 * (lo + hi)])
        return np.linspace(lo, hi, n)

    @property
    def yaws(self) -> np.ndarray:
        # full turn sampled without its duplicate endpoint
        return np.arange(self.yaw_count) * (2.0 * np.pi / self.yaw_count)

    @property
    def shape(self) -> Tuple[int, int, int, int]:
        return (*self.resolution, self.yaw_count)

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cell_volume(self) -> float:
        """Positional volume represented by one grid node (degenerate axes count as 1)."""
        volume = 1.0
        for (lo, hi), n in zip((self.x, self.y, self.z), self.resolution):
            if n > 1:
                volume *= (hi - lo) / (n - 1)
        return volume

    def cells(self) -> Iterator[Tuple[Tuple[int, int, int, int], np.ndarray, float]]:
        """(index, position, yaw) for every cell in C order."""
        xs, ys, zs, yaws = self.axis(0), self.axis(1), self.axis(2), self.yaws
        for i, j, k, m in product(*(range(n) for n in self.shape)):
            yield (i, j, k, m), np.array([xs[i], ys[j], zs[k]]), float(yaws[m])

    def with_resolution(self, nx: int, ny: int, nz: int, yaw_count: Optional[int] = None) -> "WorkspaceGrid":
        yaw_count = self.yaw_count if yaw_count is None else yaw_count
        return WorkspaceGrid(self.x, self.y, self.z, (nx, ny, nz), yaw_count)

    def to_dict(self) -> dict:
        return {
            "x": list(self.x),
            "y": list(self.y),
            "z": list(self.z),
            "resolution": list(self.resolution),
            "yaw_count": self.yaw_count,
        }
