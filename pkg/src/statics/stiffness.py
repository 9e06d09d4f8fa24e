# File: src/statics/stiffness.py
# Purpose: Elastic cable model and the numerical stiffness of the static equilibrium.

from typing import Optional, Sequence

import numpy as np

from kinematics.cable_kinematics import cable_vectors, inverse_kinematics, jacobian
from mechanism.chain import check_configuration
from mechanism.model import N_COORDS, Configuration, DesignSpec, RobotGeometry
from statics.tension_solver import gravity_load, spring_load, static_tensions

FD_STEP = 1e-6


def cable_tensions(
    lengths: np.ndarray,
    commanded: np.ndarray,
    axial_stiffness: float,
    rates: Optional[np.ndarray] = None,
    damping: float = 0.0,
) -> np.ndarray:
    """Unilateral spring-damper: k * stretch + c * rate while taut, never pushing."""
    stretch = np.asarray(lengths) - np.asarray(commanded)
    tension = axial_stiffness * stretch
    if rates is not None and damping:
        tension = tension + damping * np.asarray(rates)
    return np.where(stretch > 0.0, np.maximum(tension, 0.0), 0.0)


def total_generalized_force(
    geometry: RobotGeometry,
    spec: DesignSpec,
    q: Configuration,
    commanded: np.ndarray,
    axial_stiffness: float,
    taut: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Cables (-J^T t) + mechanism springs + gravity, without stroke checks.

    `taut` freezes which cables act as linear springs; by default a cable acts
    while its length exceeds the commanded one.
    """
    _, lengths = cable_vectors(geometry, spec, q, check=False)
    stretch = lengths - commanded
    if taut is None:
        tensions = axial_stiffness * np.maximum(stretch, 0.0)
    else:
        tensions = np.where(taut, axial_stiffness * stretch, 0.0)
    J = jacobian(geometry, spec, q, check=False)
    return -J.T @ tensions + gravity_load(geometry, spec, q) + spring_load(spec, q)


def pretensioned_commands(
    geometry: RobotGeometry,
    spec: DesignSpec,
    q: Configuration,
    axial_stiffness: float,
    tensions: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Commanded lengths whose elastic stretch carries the static tensions at q.

    With these commands the total generalized force at q vanishes wherever the
    static tensions are non-negative.
    """
    nominal = inverse_kinematics(geometry, spec, q)
    if axial_stiffness <= 0.0:
        return nominal
    if tensions is None:
        tensions = static_tensions(geometry, spec, q).tensions
    return nominal - np.maximum(tensions, 0.0) / axial_stiffness


def stiffness_matrix(
    geometry: RobotGeometry,
    spec: DesignSpec,
    q: Configuration,
    axial_stiffness: float,
    commanded: Optional[Sequence[float]] = None,
    step: float = FD_STEP,
) -> np.ndarray:
    """Symmetrized -dF/dq by central differences along the configuration retraction.

    Cables are pinned at `commanded` lengths, by default the pretensioned
    commands of the static equilibrium at q, so the pretension geometric
    stiffness is included. A cable counts as taut if it is not slack at q;
    that set is held fixed across the difference stencil.
    """
    check_configuration(spec, q)
    nominal = inverse_kinematics(geometry, spec, q)
    if commanded is None:
        commanded = pretensioned_commands(geometry, spec, q, axial_stiffness)
    commanded = np.asarray(commanded, dtype=float)
    taut = nominal - commanded >= 0.0

    K = np.zeros((N_COORDS, N_COORDS))
    for j in range(N_COORDS):
        delta = np.zeros(N_COORDS)
        delta[j] = step
        f_plus = total_generalized_force(geometry, spec, q.retract(delta), commanded, axial_stiffness, taut)
        f_minus = total_generalized_force(geometry, spec, q.retract(-delta), commanded, axial_stiffness, taut)
        K[:, j] = -(f_plus - f_minus) / (2.0 * step)
    return 0.5 * (K + K.T)
