# File: src/mechanism/maps.py
# Purpose: Scalar maps of the passive mechanisms: screw coupling, self-reversing
# winder, spring force, gripper aperture and the axial contact-force estimate.

import math
from typing import List

import numpy as np

from mechanism.model import (
    ApertureMap,
    DesignSpec,
    ScrewMap,
    SpringParams,
    Variant,
    WinderMap,
)
from utils.errors import CoilBindError, StrokeError

TWO_PI = 2.0 * math.pi
REVERSAL_EPS = 1e-12  # m; absorbs round-off of s % (2 S)


# -------------------------------------------------
# Screw coupling
# -------------------------------------------------
def screw_angle(screw: ScrewMap, s: float) -> float:
    """Relative rotation produced by axial travel s; one revolution per lead."""
    return TWO_PI * s / screw.lead


def screw_slope(screw: ScrewMap, s: float = 0.0) -> float:
    return TWO_PI / screw.lead


# -------------------------------------------------
# Self-reversing winder
# -------------------------------------------------
def winder_angle(winder: WinderMap, s: float) -> float:
    """Triangular wave: 0 -> theta_max over [0, S], back to 0 over [S, 2S]."""
    period = 2.0 * winder.stroke_period
    u = s % period
    if u <= winder.stroke_period:
        return winder.theta_max * u / winder.stroke_period
    return winder.theta_max * (period - u) / winder.stroke_period


def winder_slope(winder: WinderMap, s: float) -> float:
    """±theta_max/S on the grooves, 0 at the two reversals of each period."""
    if is_winder_reversal(winder, s, REVERSAL_EPS):
        return 0.0
    u = s % (2.0 * winder.stroke_period)
    rate = winder.theta_max / winder.stroke_period
    return rate if u < winder.stroke_period else -rate


def is_winder_reversal(winder: WinderMap, s: float, tol: float = 0.0) -> bool:
    period = 2.0 * winder.stroke_period
    u = s % period
    distance = min(u, abs(u - winder.stroke_period), period - u)
    return distance <= tol


def winder_reversals(winder: WinderMap, s_lo: float, s_hi: float) -> List[float]:
    """Reversal strokes inside [s_lo, s_hi]."""
    S = winder.stroke_period
    k = math.ceil(s_lo / S - 1e-12)
    points = []
    while k * S <= s_hi + 1e-12:
        points.append(k * S)
        k += 1
    return points


# -------------------------------------------------
# Design-level rotation map (which map drives the payload/gripper)
# -------------------------------------------------
def rotation_angle(spec: DesignSpec, s: float) -> float:
    if spec.variant is Variant.A_WINDER:
        return winder_angle(spec.winder, s)
    if spec.variant in (Variant.A_SCREW, Variant.C_ROTATABLE_GRIPPER):
        return screw_angle(spec.screw, s)
    return 0.0


def rotation_slope(spec: DesignSpec, s: float) -> float:
    if spec.variant is Variant.A_WINDER:
        return winder_slope(spec.winder, s)
    if spec.variant in (Variant.A_SCREW, Variant.C_ROTATABLE_GRIPPER):
        return screw_slope(spec.screw, s)
    return 0.0


def rotation_coordinate(spec: DesignSpec) -> int:
    """Index (0 or 1) of the internal coordinate feeding the rotation map."""
    return 1 if spec.variant is Variant.C_ROTATABLE_GRIPPER else 0


# -------------------------------------------------
# Springs
# -------------------------------------------------
def spring_force(spring: SpringParams, x: float) -> float:
    """Compressive force at extension x; positive pushes the spring seats apart."""
    if x < spring.min_extension:
        raise CoilBindError(x, spring.min_extension)
    return spring.stiffness * (spring.free_extension - x)


def spring_force_at_stroke(spring: SpringParams, s: float) -> float:
    return spring_force(spring, spring.extension_at(s))


def spring_energy(spring: SpringParams, s: float) -> float:
    compression = spring.free_extension - spring.extension_at(s)
    return 0.5 * spring.stiffness * compression ** 2


def axial_contact_force(spring: SpringParams, s: float, external_load: float = 0.0) -> float:
    """Quasi-static contact force along the shaft; contact cannot pull."""
    force = spring_force_at_stroke(spring, s) - external_load
    return max(0.0, force)


# -------------------------------------------------
# Gripper aperture
# -------------------------------------------------
def aperture_coordinate(spec: DesignSpec) -> str:
    return "s1" if spec.variant is Variant.C_ROTATABLE_GRIPPER else "s"


def check_stroke(spec: DesignSpec, name: str, value: float) -> None:
    limits = spec.stroke_limits.get(name)
    if limits is None:
        return
    lo, hi = limits
    if value < lo:
        raise StrokeError(name, value, "lower", lo)
    if value > hi:
        raise StrokeError(name, value, "upper", hi)


def _aperture_table(spec: DesignSpec) -> ApertureMap:
    if spec.aperture_map is None:
        raise ValueError(f"variant {spec.variant.value} has no gripper aperture map")
    return spec.aperture_map


def grip_aperture(spec: DesignSpec, s: float) -> float:
    table = _aperture_table(spec)
    check_stroke(spec, aperture_coordinate(spec), s)
    return float(np.interp(s, table.stroke, table.aperture))


def aperture_slope(spec: DesignSpec, s: float) -> float:
    """Slope of the opening map; exactly 0 on the closed plateau and past the last breakpoint."""
    table = _aperture_table(spec)
    check_stroke(spec, aperture_coordinate(spec), s)
    if s <= table.closure_breakpoint or s >= table.stroke[-1] or s < table.stroke[0]:
        return 0.0
    stroke = table.stroke
    for i in range(len(stroke) - 1):
        if stroke[i] <= s < stroke[i + 1]:
            return (table.aperture[i + 1] - table.aperture[i]) / (stroke[i + 1] - stroke[i])
    return 0.0


def grasp_state(spec: DesignSpec, s: float) -> str:
    """closed / opening / open, from the aperture map."""
    table = _aperture_table(spec)
    g = grip_aperture(spec, s)
    if g <= table.aperture[0]:
        return "closed"
    if g >= max(table.aperture):
        return "open"
    return "opening"


def aperture_violations(table: ApertureMap) -> List[str]:
    problems = []
    if len(table.stroke) != len(table.aperture) or len(table.stroke) < 2:
        problems.append("aperture_map needs at least two matching breakpoints")
        return problems
    if any(b <= a for a, b in zip(table.stroke, table.stroke[1:])):
        problems.append("aperture_map stroke breakpoints must be strictly increasing")
    if any(b < a for a, b in zip(table.aperture, table.aperture[1:])):
        problems.append("aperture_map must open monotonically with compression")
    if any(g < 0 for g in table.aperture):
        problems.append("aperture_map openings must be non-negative")
    return problems
