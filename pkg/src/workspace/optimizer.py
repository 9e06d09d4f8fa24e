# File: src/workspace/optimizer.py
"""
Parameter Optimizer - derivative-free tuning of spring and screw parameters.

Purpose:
    Maximize an objective (rotational stroke, workspace volume or any callable)
    over a box of design parameters. A coarse grid picks the starting point,
    then golden-section searches refine one coordinate at a time inside the
    grid cell around it. Every evaluation is recorded in the trace.

Usage:
    result = optimize_parameters(geometry, spec, ["lead"], "rotational-stroke",
                                 {"lead": (0.03, 0.08)}, budget=40)
"""

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from mechanism.model import DesignSpec, RobotGeometry
from mechanism.validation import validate_scenario
from utils.config import progress_enabled
from utils.errors import CableRobotError
from utils.run_logger import get_logger
from workspace.feasibility import wrench_feasible_workspace
from workspace.grid import WorkspaceGrid
from workspace.rotation import rotational_workspace

logger = get_logger()

PARAMETERS = ("spring_stiffness", "spring_free_extension", "lead")
OBJECTIVES = ("rotational-stroke", "workspace-volume")
GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0
REFINE_TOL = 1e-4  # on the normalized [0, 1] scale

Objective = Callable[[Dict[str, float]], Optional[float]]


@dataclass
class ObjectiveContext:
    """Evaluation settings shared by the built-in objectives."""

    position: Tuple[float, float, float] = (0.0, 0.0, 1.0)
    clearance: float = 0.01
    grid: Optional[WorkspaceGrid] = None
    internal: Tuple[float, float] = (0.1, 0.0)
    stroke_samples: int = 41
    psi_range: float = 0.3
    psi_samples: int = 3


@dataclass
class OptimizationResult:
    status: str  # "optimal" | "all-infeasible"
    params: Optional[Dict[str, float]]
    value: Optional[float]
    trace: List[Tuple[Dict[str, float], Optional[float]]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "params": self.params,
            "value": self.value,
            "evaluations": len(self.trace),
            "trace": [{"params": p, "value": v} for p, v in self.trace],
        }


# -------------------------------------------------
# Design updates and built-in objectives
# -------------------------------------------------
def apply_parameters(spec: DesignSpec, params: Dict[str, float]) -> DesignSpec:
    """Return a copy of spec with the named parameters set (springs updated together)."""
    for name, value in params.items():
        if name == "lead":
            spec = spec.with_updates(lead=float(value))
        elif name == "spring_stiffness":
            for spring in spec.springs:
                spec = spec.with_spring(spring, stiffness=float(value))
        elif name == "spring_free_extension":
            for spring in spec.springs:
                spec = spec.with_spring(spring, free_extension=float(value))
        else:
            raise ValueError(f"unknown parameter '{name}' (expected one of {PARAMETERS})")
    return spec


def builtin_objective(
    geometry: RobotGeometry, spec: DesignSpec, name: str, context: ObjectiveContext
) -> Objective:
    if name not in OBJECTIVES:
        raise ValueError(f"unknown objective '{name}' (expected one of {OBJECTIVES})")

    def evaluate(params: Dict[str, float]) -> Optional[float]:
        candidate = apply_parameters(spec, params)
        if validate_scenario(geometry, candidate):
            return None
        try:
            if name == "rotational-stroke":
                rot = rotational_workspace(
                    geometry,
                    candidate,
                    context.position,
                    context.clearance,
                    context.stroke_samples,
                    context.psi_range,
                    context.psi_samples,
                    fixed_internal=context.internal[0],
                )
                return rot.width if rot.feasible_samples else None
            grid = context.grid or WorkspaceGrid((-0.6, 0.6), (-0.6, 0.6), (0.7, 1.3), (5, 5, 3), 4)
            wmap = wrench_feasible_workspace(
                geometry, candidate, grid, context.internal, context.clearance, progress=False
            )
            return wmap.volume if wmap.feasible_count else None
        except CableRobotError:
            return None

    return evaluate


# -------------------------------------------------
# Search
# -------------------------------------------------
class _Evaluator:
    """Memoized objective on the normalized scale with a hard evaluation budget."""

    def __init__(self, objective: Objective, names, lows, highs, budget: int, progress: bool):
        self.objective = objective
        self.names = list(names)
        self.lows = np.asarray(lows, dtype=float)
        self.highs = np.asarray(highs, dtype=float)
        self.budget = budget
        self.cache: Dict[Tuple[float, ...], Optional[float]] = {}
        self.trace: List[Tuple[Dict[str, float], Optional[float]]] = []
        self.best_u: Optional[np.ndarray] = None
        self.best_value: Optional[float] = None
        self.bar = tqdm(total=budget, desc="Optimizer", disable=not progress)

    @property
    def exhausted(self) -> bool:
        return len(self.trace) >= self.budget

    def params(self, u: np.ndarray) -> Dict[str, float]:
        x = self.lows + np.clip(u, 0.0, 1.0) * (self.highs - self.lows)
        return {n: float(v) for n, v in zip(self.names, x)}

    def __call__(self, u: np.ndarray) -> float:
        key = tuple(np.round(np.clip(u, 0.0, 1.0), 12))
        if key in self.cache:
            value = self.cache[key]
        elif self.exhausted:
            return -np.inf
        else:
            params = self.params(np.array(key))
            value = self.objective(params)
            if value is not None and not np.isfinite(value):
                value = None
            self.cache[key] = value
            self.trace.append((params, value))
            self.bar.update(1)
            if value is not None and (self.best_value is None or value > self.best_value):
                self.best_value, self.best_u = value, np.array(key)
        return -np.inf if value is None else value


def _golden_section(f: Callable[[float], float], a: float, b: float, evaluator: _Evaluator) -> None:
    """Shrink [a, b] towards a maximum of f; the evaluator keeps the best point seen."""
    c = b - (b - a) / GOLDEN
    d = a + (b - a) / GOLDEN
    while abs(c - d) > REFINE_TOL and not evaluator.exhausted:
        if f(c) > f(d):
            b = d
        else:
            a = c
        c = b - (b - a) / GOLDEN
        d = a + (b - a) / GOLDEN


def optimize_parameters(
    geometry: RobotGeometry,
    spec: DesignSpec,
    free_params: Sequence[str],
    objective: Union[str, Objective],
    bounds: Dict[str, Tuple[float, float]],
    budget: int = 60,
    context: Optional[ObjectiveContext] = None,
    progress: Optional[bool] = None,
) -> OptimizationResult:
    """Coarse grid + coordinate-wise golden-section maximization; deterministic."""
    if budget < 1:
        raise ValueError("budget must be at least 1")
    names = list(free_params)
    if not names:
        raise ValueError("at least one free parameter is required")
    for name in names:
        if name not in bounds:
            raise ValueError(f"missing bounds for '{name}'")
        lo, hi = bounds[name]
        if hi < lo:
            raise ValueError(f"bounds for '{name}' are empty")
    if isinstance(objective, str):
        objective = builtin_objective(geometry, spec, objective, context or ObjectiveContext())

    lows = [bounds[n][0] for n in names]
    highs = [bounds[n][1] for n in names]
    span = np.array(highs) - np.array(lows)
    active = [k for k in range(len(names)) if span[k] > 0]
    show = progress_enabled() if progress is None else progress
    evaluator = _Evaluator(objective, names, lows, highs, budget, show)
    logger.info(f"⚙️ Optimizing {names} with budget {budget}")

    # -------- coarse grid --------
    per_axis = max(1, int(np.floor((max(1, budget // 2)) ** (1.0 / max(1, len(active))))))
    axes = [np.linspace(0.0, 1.0, per_axis) if (k in active and per_axis > 1) else np.array([0.0])
            for k in range(len(names))]
    for point in product(*axes):
        if evaluator.exhausted:
            break
        evaluator(np.array(point))

    # -------- coordinate-wise golden-section refinement --------
    half_width = 1.0 / (per_axis - 1) if per_axis > 1 else 0.5
    while evaluator.best_u is not None and not evaluator.exhausted and active:
        start = len(evaluator.trace)
        for k in active:
            if evaluator.exhausted:
                break
            center = evaluator.best_u.copy()

            def along(t: float, k=k, center=center) -> float:
                u = center.copy()
                u[k] = t
                return evaluator(u)

            _golden_section(along, max(0.0, center[k] - half_width), min(1.0, center[k] + half_width), evaluator)
        if len(evaluator.trace) == start:
            break  # every refinement point already cached
        half_width = max(half_width / GOLDEN, REFINE_TOL)
        if half_width <= REFINE_TOL:
            break

    evaluator.bar.close()
    if evaluator.best_u is None:
        logger.warning(f"⚠️ No feasible parameters found in {len(evaluator.trace)} evaluations")
        return OptimizationResult("all-infeasible", None, None, evaluator.trace)

    best = evaluator.params(evaluator.best_u)
    logger.info(f"✅ Optimizer best {best} -> {evaluator.best_value:.6g}")
    return OptimizationResult("optimal", best, evaluator.best_value, evaluator.trace)
