# File: src/motion/dynamics.py
"""
Forward Dynamics - minimal-coordinate simulator with stiff elastic cables.

Purpose:
    SimState holds the configuration, its 8-vector tangent velocity
    [world linear, reference-body angular (body frame), internal rates] and time.
    step_dynamics advances it with semi-implicit Euler:

        v+ = v + dt * M(q)^-1 * F(q, v)
        q+ = retract(q, dt * v+)

    M(q) is assembled from per-body mass and inertia through the body point and
    angular Jacobians. Velocity-product (Coriolis/centrifugal) terms are not
    modelled; they vanish at rest and stay small for the slow moves the
    kinematic rollout commands.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from kinematics.cable_kinematics import cable_vectors, jacobian
from mechanism.chain import angular_jacobian, body_poses, point_jacobian
from mechanism.maps import spring_energy
from mechanism.model import N_COORDS, Configuration, DesignSpec, RobotGeometry
from statics.stiffness import cable_tensions, pretensioned_commands
from statics.tension_solver import gravity_load, spring_load
from utils.errors import DivergenceError

CABLE_STIFFNESS = 1e5  # N/m
CABLE_DAMPING = 50.0  # N s/m
DT = 1e-3


@dataclass(frozen=True)
class CableModel:
    stiffness: float = CABLE_STIFFNESS
    damping: float = CABLE_DAMPING


@dataclass(frozen=True)
class SimState:
    q: Configuration
    v: np.ndarray = field(default_factory=lambda: np.zeros(N_COORDS))
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float).reshape(N_COORDS))

    @property
    def finite(self) -> bool:
        return bool(np.all(np.isfinite(self.q.as_vector())) and np.all(np.isfinite(self.v)))


# -------------------------------------------------
# Inertia and forces
# -------------------------------------------------
def mass_matrix(geometry: RobotGeometry, spec: DesignSpec, q: Configuration) -> np.ndarray:
    """Generalized mass matrix sum_b m_b Jv^T Jv + Jw^T I_world Jw (symmetric positive definite)."""
    poses = body_poses(geometry, spec, q, check=False)
    M = np.zeros((N_COORDS, N_COORDS))
    for body in spec.variant.bodies:
        props = spec.masses[body]
        Jv = point_jacobian(geometry, spec, q, body, np.zeros(3))
        Jw = angular_jacobian(geometry, spec, q, body)
        R = poses[body].matrix
        M += props.mass * Jv.T @ Jv + Jw.T @ (R @ props.inertia @ R.T) @ Jw
    return 0.5 * (M + M.T)


def cable_state(
    geometry: RobotGeometry,
    spec: DesignSpec,
    state: SimState,
    commanded: np.ndarray,
    cables: CableModel,
):
    """Cable lengths, rates, tensions and the length Jacobian at the current state."""
    _, lengths = cable_vectors(geometry, spec, state.q, check=False)
    J = jacobian(geometry, spec, state.q, check=False)
    rates = J @ state.v
    tensions = cable_tensions(lengths, commanded, cables.stiffness, rates, cables.damping)
    return lengths, rates, tensions, J


def generalized_forces(
    geometry: RobotGeometry,
    spec: DesignSpec,
    state: SimState,
    commanded: np.ndarray,
    cables: CableModel,
) -> np.ndarray:
    _, _, tensions, J = cable_state(geometry, spec, state, commanded, cables)
    return -J.T @ tensions + gravity_load(geometry, spec, state.q) + spring_load(spec, state.q)


def generalized_acceleration(
    geometry: RobotGeometry,
    spec: DesignSpec,
    state: SimState,
    commanded: np.ndarray,
    cables: CableModel = CableModel(),
) -> np.ndarray:
    M = mass_matrix(geometry, spec, state.q)
    F = generalized_forces(geometry, spec, state, np.asarray(commanded, dtype=float), cables)
    try:
        return cho_solve(cho_factor(M), F)
    except LinAlgError:
        raise DivergenceError("mass matrix lost positive definiteness", state)


# -------------------------------------------------
# Integration
# -------------------------------------------------
def _stroke_stops(spec: DesignSpec, q: Configuration, v: np.ndarray):
    """Clamp internal coordinates at their mechanical stops, stopping motion into the stop."""
    internal = list(q.internal)
    v = v.copy()
    for k, name in enumerate(spec.variant.internal_names):
        limits = spec.stroke_limits.get(name)
        if limits is None:
            continue
        lo, hi = limits
        if internal[k] < lo:
            internal[k] = lo
            v[6 + k] = max(v[6 + k], 0.0)
        elif internal[k] > hi:
            internal[k] = hi
            v[6 + k] = min(v[6 + k], 0.0)
    return Configuration(q.base_pose, tuple(internal)), v


def step_dynamics(
    geometry: RobotGeometry,
    spec: DesignSpec,
    state: SimState,
    commanded: Sequence[float],
    dt: float = DT,
    cables: CableModel = CableModel(),
) -> SimState:
    """One semi-implicit Euler step; raises DivergenceError carrying the last finite state."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if not state.finite:
        raise DivergenceError("state is not finite", state)
    a = generalized_acceleration(geometry, spec, state, np.asarray(commanded, dtype=float), cables)
    v_next = state.v + dt * a
    if not np.all(np.isfinite(v_next)):
        raise DivergenceError(f"non-finite velocity at t={state.t:.4f} s", state)
    try:
        q_next = state.q.retract(dt * v_next)
    except ValueError as e:
        raise DivergenceError(f"retraction failed at t={state.t:.4f} s: {e}", state)
    q_next, v_next = _stroke_stops(spec, q_next, v_next)
    nxt = SimState(q_next, v_next, state.t + dt)
    if not nxt.finite:
        raise DivergenceError(f"non-finite state at t={nxt.t:.4f} s", state)
    return nxt


def simulate(
    geometry: RobotGeometry,
    spec: DesignSpec,
    state: SimState,
    commanded: Sequence[float],
    duration: float,
    dt: float = DT,
    cables: CableModel = CableModel(),
) -> SimState:
    steps = int(round(duration / dt))
    for _ in range(steps):
        state = step_dynamics(geometry, spec, state, commanded, dt, cables)
    return state


# -------------------------------------------------
# Equilibrium commands and energy
# -------------------------------------------------
def hold_commands(
    geometry: RobotGeometry,
    spec: DesignSpec,
    q: Configuration,
    cable_stiffness: float = CABLE_STIFFNESS,
    tensions: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Commanded lengths whose elastic stretch reproduces the static tensions at q."""
    return pretensioned_commands(geometry, spec, q, cable_stiffness, tensions)


def energy(
    geometry: RobotGeometry,
    spec: DesignSpec,
    state: SimState,
    commanded: Sequence[float],
    cable_stiffness: float = CABLE_STIFFNESS,
) -> float:
    """Kinetic + gravity + mechanism spring + cable strain energy."""
    M = mass_matrix(geometry, spec, state.q)
    kinetic = 0.5 * state.v @ M @ state.v
    poses = body_poses(geometry, spec, state.q, check=False)
    gravity = -sum(spec.masses[b].mass * spec.gravity @ poses[b].position for b in spec.variant.bodies)
    names = spec.variant.internal_names
    springs = sum(
        spring_energy(spec.springs[name], state.q.internal[names.index(name)])
        for name in spec.variant.translational
    )
    _, lengths = cable_vectors(geometry, spec, state.q, check=False)
    stretch = np.maximum(lengths - np.asarray(commanded, dtype=float), 0.0)
    strain = 0.5 * cable_stiffness * float(stretch @ stretch)
    return float(kinetic + gravity + springs + strain)
