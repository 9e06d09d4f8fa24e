# File: src/statics/tension_solver.py
"""
Tension Solver - static equilibrium of the non-redundant cable robot.

Purpose:
    generalized_load   -> gravity + spring generalized forces w(q)
    solve_tensions     -> unique t with J^T t = w and its bound verdict
    distribute_tensions-> min ||t||^2 for redundant structure matrices (QP)

Sign convention:
    J = d(length)/dq, cables contribute -J^T t, so equilibrium reads J^T t = w.
"""

import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import quadprog
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve, qr, solve_triangular
from scipy.optimize import linprog

from kinematics.cable_kinematics import jacobian
from mechanism.chain import check_configuration, point_jacobian
from mechanism.maps import spring_force_at_stroke
from mechanism.model import N_COORDS, Configuration, DesignSpec, RobotGeometry
from utils.errors import SingularityError
from utils.run_logger import get_logger

logger = get_logger()

DEFAULT_BOUNDS = (5.0, 500.0)
PIVOT_TOL = 1e-12


# -------------------------------------------------
# Generalized loads
# -------------------------------------------------
def gravity_load(geometry: RobotGeometry, spec: DesignSpec, q: Configuration) -> np.ndarray:
    """Virtual work of every body's weight at its origin (the center of mass)."""
    load = np.zeros(N_COORDS)
    for body in spec.variant.bodies:
        weight = spec.masses[body].mass * spec.gravity
        load += point_jacobian(geometry, spec, q, body, np.zeros(3)).T @ weight
    return load


def spring_load(spec: DesignSpec, q: Configuration) -> np.ndarray:
    """Restoring generalized force of each mechanism spring on its internal coordinate."""
    load = np.zeros(N_COORDS)
    names = spec.variant.internal_names
    for name in spec.variant.translational:
        idx = 6 + names.index(name)
        load[idx] = -spring_force_at_stroke(spec.springs[name], q.internal[names.index(name)])
    return load


def generalized_load(geometry: RobotGeometry, spec: DesignSpec, q: Configuration) -> np.ndarray:
    """Right-hand side w of J^T t = w; raises CoilBindError / StrokeError."""
    check_configuration(spec, q)
    return gravity_load(geometry, spec, q) + spring_load(spec, q)


# -------------------------------------------------
# Square system
# -------------------------------------------------
@dataclass
class TensionResult:
    tensions: np.ndarray
    residual: float
    bounds: Tuple[float, float]
    low: List[int] = field(default_factory=list)
    high: List[int] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return not self.low and not self.high

    @property
    def verdict(self) -> str:
        if self.low:
            return "tension-low"
        if self.high:
            return "tension-high"
        return "feasible"

    def to_dict(self) -> dict:
        return {
            "tensions": self.tensions.tolist(),
            "residual": self.residual,
            "verdict": self.verdict,
            "below_t_min": self.low,
            "above_t_max": self.high,
        }


def _solve_lu(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    with warnings.catch_warnings():
        warnings.simplefilter("error", LinAlgWarning)
        try:
            lu, piv = lu_factor(A)
        except (LinAlgWarning, ValueError) as e:
            raise SingularityError(f"structure matrix is singular: {e}")
    if np.min(np.abs(np.diag(lu))) <= PIVOT_TOL * max(1.0, np.max(np.abs(lu))):
        raise SingularityError("structure matrix is singular (zero pivot)")
    return lu_solve((lu, piv), b)


def _solve_qr(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    Q, R = qr(A)
    if np.min(np.abs(np.diag(R))) <= PIVOT_TOL * max(1.0, np.max(np.abs(R))):
        raise SingularityError("structure matrix is singular (rank-deficient R)")
    return solve_triangular(R, Q.T @ b)


def solve_tensions(
    J: np.ndarray,
    w: Sequence[float],
    bounds: Tuple[float, float] = DEFAULT_BOUNDS,
    method: str = "lu",
) -> TensionResult:
    """Unique tensions of the square system J^T t = w plus the per-cable bound verdict."""
    J = np.asarray(J, dtype=float)
    w = np.asarray(w, dtype=float)
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        raise ValueError(f"solve_tensions needs a square Jacobian, got {J.shape}")
    if w.shape != (J.shape[1],):
        raise ValueError(f"wrench length {w.shape} does not match Jacobian {J.shape}")
    if not np.all(np.isfinite(J)):
        raise SingularityError("Jacobian has non-finite entries")

    A = J.T
    if method == "lu":
        t = _solve_lu(A, w)
    elif method == "qr":
        t = _solve_qr(A, w)
    else:
        raise ValueError(f"unknown factorization '{method}'")

    t_min, t_max = bounds
    residual = float(np.max(np.abs(A @ t - w)))
    return TensionResult(
        tensions=t,
        residual=residual,
        bounds=(t_min, t_max),
        low=[i for i, ti in enumerate(t) if ti < t_min],
        high=[i for i, ti in enumerate(t) if ti > t_max],
    )


def static_tensions(
    geometry: RobotGeometry,
    spec: DesignSpec,
    q: Configuration,
) -> TensionResult:
    """solve_tensions at configuration q with the design's tension bounds."""
    return solve_tensions(jacobian(geometry, spec, q), generalized_load(geometry, spec, q), spec.tension_bounds)


# -------------------------------------------------
# Redundant systems (tension distribution)
# -------------------------------------------------
@dataclass
class DistributionResult:
    status: str  # "optimal" | "infeasible"
    tensions: Optional[np.ndarray] = None
    objective: Optional[float] = None
    kkt_residual: Optional[float] = None

    @property
    def feasible(self) -> bool:
        return self.status == "optimal"


def _phase_one(A, w, lo, hi) -> bool:
    """True if {A t = w, lo <= t <= hi} is non-empty (HiGHS LP with zero objective)."""
    n = A.shape[1]
    res = linprog(np.zeros(n), A_eq=A, b_eq=w, bounds=[(lo, hi)] * n, method="highs")
    return res.status == 0


def distribute_tensions(
    A: np.ndarray,
    w: Sequence[float],
    bounds: Tuple[float, float] = DEFAULT_BOUNDS,
) -> DistributionResult:
    """Minimum-norm tensions with A t = w and t_min <= t <= t_max.

    Infeasibility is a returned status, not an exception.
    """
    A = np.asarray(A, dtype=float)
    w = np.asarray(w, dtype=float).reshape(-1)
    if A.ndim != 2:
        raise ValueError("structure matrix must be 2-D")
    m, n = A.shape
    if w.shape[0] != m:
        raise ValueError(f"wrench has {w.shape[0]} entries, structure matrix has {m} rows")
    if n < m:
        raise ValueError(f"need at least as many cables as wrench components ({n} < {m})")
    lo, hi = bounds

    if not _phase_one(A, w, lo, hi):
        logger.warning("⚠️ Tension distribution infeasible for the requested wrench")
        return DistributionResult(status="infeasible")

    # quadprog: min 1/2 t^T G t - a^T t  s.t.  C^T t >= b, first meq rows equalities
    G = np.eye(n)
    a = np.zeros(n)
    C = np.hstack([A.T, np.eye(n), -np.eye(n)])
    b = np.concatenate([w, np.full(n, lo), np.full(n, -hi)])
    try:
        t, _, _, _, multipliers, _ = quadprog.solve_qp(G, a, C, b, m)
    except ValueError as e:
        logger.warning(f"⚠️ QP solver rejected a feasible instance: {e}")
        return DistributionResult(status="infeasible")

    stationarity = G @ t - a - C @ multipliers
    primal = A @ t - w
    bound_violation = np.concatenate([np.maximum(lo - t, 0.0), np.maximum(t - hi, 0.0)])
    kkt = float(max(np.max(np.abs(stationarity)), np.max(np.abs(primal)), np.max(bound_violation, initial=0.0)))
    return DistributionResult(status="optimal", tensions=t, objective=float(np.dot(t, t)), kkt_residual=kkt)
