# File: src/mechanism/layouts.py
# Purpose: Alternative anchor/attachment layouts derived from a base geometry.

from dataclasses import replace

import numpy as np

from mechanism.model import Attachment, RobotGeometry


def _flip_z(point: np.ndarray) -> np.ndarray:
    return np.array([point[0], point[1], -point[2]])


def mirror_design_a_vertical(geometry: RobotGeometry) -> RobotGeometry:
    """Swapped-body arrangement: the two anchor rows trade places.

    Cables of the upper body run to the floor row and cables of the lower body
    to the ceiling row, so the rods point the other way along the shaft. The
    degrees of freedom and the cable-to-body assignment are unchanged.
    """
    n = len(geometry.anchors)
    half = n // 2
    anchors = np.vstack([geometry.anchors[half:], geometry.anchors[:half]])
    attachments = tuple(Attachment(a.body, _flip_z(a.local)) for a in geometry.attachments)
    bodies = {
        name: replace(shape, rod_tips=tuple(_flip_z(p) for p in shape.rod_tips))
        for name, shape in geometry.bodies.items()
    }
    return replace(geometry, anchors=anchors, attachments=attachments, bodies=bodies)


def top_mounted_geometry(geometry: RobotGeometry) -> RobotGeometry:
    """All anchors lifted to the highest anchor plane (suspended layout for contact tasks)."""
    anchors = np.array(geometry.anchors, dtype=float)
    anchors[:, 2] = anchors[:, 2].max()
    return geometry.with_anchors(anchors)
