# File: src/workspace/interference.py
"""
Interference - minimum distances between cables and between cables and bodies.

Cables are straight segments anchor -> attachment. Bodies are boxes fixed in
their body frames. Cable pairs use the closed-form closest points of two
segments; cable/body pairs move the segment into the box frame and minimize
the (convex) point-to-box distance along it.
"""

from dataclasses import dataclass
from itertools import combinations
from typing import List, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from mechanism.chain import attachment_points, body_poses
from mechanism.model import Configuration, DesignSpec, RobotGeometry

EPS = 1e-12


# -------------------------------------------------
# Distance primitives
# -------------------------------------------------
def segment_distance(p1, q1, p2, q2) -> float:
    """Minimum distance between segments [p1, q1] and [p2, q2]."""
    p1, q1, p2, q2 = (np.asarray(v, dtype=float) for v in (p1, q1, p2, q2))
    d1, d2, r = q1 - p1, q2 - p2, p1 - p2
    a, e, f = d1 @ d1, d2 @ d2, d2 @ r

    if a <= EPS and e <= EPS:
        return float(np.linalg.norm(r))
    if a <= EPS:
        s, t = 0.0, float(np.clip(f / e, 0.0, 1.0))
    else:
        c = d1 @ r
        if e <= EPS:
            s, t = float(np.clip(-c / a, 0.0, 1.0)), 0.0
        else:
            b = d1 @ d2
            denom = a * e - b * b
            # parallel segments: pick s = 0 and let the clamps below fix t
            s = float(np.clip((b * f - c * e) / denom, 0.0, 1.0)) if denom > EPS * a * e else 0.0
            t = (b * s + f) / e
            if t < 0.0:
                t, s = 0.0, float(np.clip(-c / a, 0.0, 1.0))
            elif t > 1.0:
                t, s = 1.0, float(np.clip((b - c) / a, 0.0, 1.0))
    return float(np.linalg.norm((p1 + s * d1) - (p2 + t * d2)))


def point_box_distance(point, half_extents) -> float:
    excess = np.maximum(np.abs(np.asarray(point, dtype=float)) - half_extents, 0.0)
    return float(np.linalg.norm(excess))


def _segment_hits_box(a: np.ndarray, b: np.ndarray, half: np.ndarray) -> bool:
    """Slab test of segment a->b against the centered box."""
    direction = b - a
    lo, hi = 0.0, 1.0
    for k in range(3):
        if abs(direction[k]) <= EPS:
            if abs(a[k]) > half[k]:
                return False
            continue
        t1 = (-half[k] - a[k]) / direction[k]
        t2 = (half[k] - a[k]) / direction[k]
        lo, hi = max(lo, min(t1, t2)), min(hi, max(t1, t2))
        if lo > hi:
            return False
    return True


def segment_box_distance(a, b, half_extents) -> float:
    """Distance from segment [a, b] (box frame) to the centered box with given half extents."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    half = np.asarray(half_extents, dtype=float)
    if _segment_hits_box(a, b, half):
        return 0.0
    along = lambda u: point_box_distance(a + u * (b - a), half)
    res = minimize_scalar(along, bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-10})
    return float(min(res.fun, along(0.0), along(1.0)))


# -------------------------------------------------
# Report
# -------------------------------------------------
@dataclass(frozen=True)
class InterferenceEntry:
    kind: str  # "cable-cable" | "cable-body"
    indices: Tuple
    distance: float
    flagged: bool

    def to_dict(self) -> dict:
        return {"kind": self.kind, "indices": list(self.indices), "distance": self.distance, "flagged": self.flagged}


@dataclass(frozen=True)
class InterferenceReport:
    entries: Tuple[InterferenceEntry, ...]
    clearance: float

    @property
    def flagged(self) -> List[InterferenceEntry]:
        return [e for e in self.entries if e.flagged]

    @property
    def clear(self) -> bool:
        return not self.flagged

    @property
    def min_distance(self) -> float:
        return self.entries[0].distance if self.entries else float("inf")

    def to_dict(self) -> dict:
        return {
            "clearance": self.clearance,
            "clear": self.clear,
            "entries": [e.to_dict() for e in self.entries],
        }


def check_interference(
    geometry: RobotGeometry,
    spec: DesignSpec,
    q: Configuration,
    clearance: float = 0.01,
) -> InterferenceReport:
    """All cable/cable and cable/body minimum distances, sorted ascending."""
    points = attachment_points(geometry, spec, q)
    anchors = geometry.anchors
    entries: List[InterferenceEntry] = []

    for i, j in combinations(range(len(anchors)), 2):
        d = segment_distance(anchors[i], points[i], anchors[j], points[j])
        entries.append(InterferenceEntry("cable-cable", (i, j), d, d < clearance))

    poses = body_poses(geometry, spec, q, check=False)
    for name in spec.variant.bodies:
        shape = geometry.bodies.get(name)
        if shape is None:
            continue
        to_body = poses[name].inverse()
        for i in range(len(anchors)):
            a_local = to_body.apply(anchors[i])
            b_local = to_body.apply(points[i])
            d = segment_box_distance(a_local, b_local, shape.half_extents)
            entries.append(InterferenceEntry("cable-body", (i, name), d, d < clearance))

    entries.sort(key=lambda e: e.distance)
    return InterferenceReport(tuple(entries), clearance)
