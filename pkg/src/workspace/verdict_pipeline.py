# File: src/workspace/verdict_pipeline.py
"""
Cell Verdict Pipeline - LangGraph check chain for one workspace sample.

Checks run in a fixed order and the first failure short-circuits to the
verdict node:

    stroke -> kinematics -> singularity -> tensions -> interference -> verdict
"""

from typing import Any, Dict, Optional, Tuple, TypedDict

import numpy as np
from langgraph.graph import END, StateGraph

from kinematics.cable_kinematics import SINGULARITY_THRESHOLD, inverse_kinematics, is_singular
from mechanism.chain import check_configuration
from mechanism.model import Configuration, DesignSpec, RobotGeometry
from statics.tension_solver import static_tensions
from utils.errors import CoilBindError, SingularityError, StrokeError
from workspace.interference import check_interference

VERDICT_CODES = {
    "feasible": 0,
    "tension-low": 1,
    "tension-high": 2,
    "interference": 3,
    "singular": 4,
    "out-of-stroke": 5,
}
VERDICT_NAMES = {code: name for name, code in VERDICT_CODES.items()}


# Define state structure
class CellState(TypedDict, total=False):
    geometry: RobotGeometry
    spec: DesignSpec
    configuration: Configuration
    clearance: float
    threshold: float
    check_singularity: bool
    lengths: Optional[np.ndarray]
    tensions: Optional[np.ndarray]
    min_distance: Optional[float]
    verdict: str
    detail: str


def stroke_node(state: CellState) -> CellState:
    """Internal coordinates inside their strokes, springs clear of coil bind"""
    spec = state["spec"]
    q = state["configuration"]
    try:
        check_configuration(spec, q)
        names = spec.variant.internal_names
        for name in spec.variant.translational:
            spring = spec.springs[name]
            extension = spring.extension_at(q.internal[names.index(name)])
            if extension < spring.min_extension:
                raise CoilBindError(extension, spring.min_extension)
    except (StrokeError, CoilBindError) as e:
        return {**state, "verdict": "out-of-stroke", "detail": str(e)}
    return state


def kinematics_node(state: CellState) -> CellState:
    try:
        lengths = inverse_kinematics(state["geometry"], state["spec"], state["configuration"])
    except SingularityError as e:
        return {**state, "verdict": "singular", "detail": str(e)}
    return {**state, "lengths": lengths}


def singularity_node(state: CellState) -> CellState:
    if not state.get("check_singularity", True):
        return state
    if is_singular(state["geometry"], state["spec"], state["configuration"], state["threshold"]):
        return {**state, "verdict": "singular", "detail": "condition number above threshold or map reversal"}
    return state


def tension_node(state: CellState) -> CellState:
    """Unique static tensions under gravity and spring load"""
    try:
        result = static_tensions(state["geometry"], state["spec"], state["configuration"])
    except SingularityError as e:
        return {**state, "verdict": "singular", "detail": str(e)}
    if not result.feasible:
        cables = result.low or result.high
        return {
            **state,
            "tensions": result.tensions,
            "verdict": result.verdict,
            "detail": f"cables {cables} outside [{result.bounds[0]}, {result.bounds[1]}] N",
        }
    return {**state, "tensions": result.tensions}


def interference_node(state: CellState) -> CellState:
    report = check_interference(
        state["geometry"], state["spec"], state["configuration"], state["clearance"]
    )
    if not report.clear:
        worst = report.flagged[0]
        return {
            **state,
            "min_distance": report.min_distance,
            "verdict": "interference",
            "detail": f"{worst.kind} {list(worst.indices)} at {worst.distance:.4f} m",
        }
    return {**state, "min_distance": report.min_distance}


def verdict_node(state: CellState) -> CellState:
    """Cells that passed every check are feasible"""
    if state.get("verdict"):
        return state
    return {**state, "verdict": "feasible", "detail": ""}


def _next(node: str):
    return lambda state: "verdict" if state.get("verdict") else node


def build_cell_graph():
    """Build and compile the per-cell check chain"""
    workflow = StateGraph(CellState)

    workflow.add_node("stroke", stroke_node)
    workflow.add_node("kinematics", kinematics_node)
    workflow.add_node("singularity", singularity_node)
    workflow.add_node("tensions", tension_node)
    workflow.add_node("interference", interference_node)
    workflow.add_node("verdict", verdict_node)

    workflow.set_entry_point("stroke")
    # any node that sets a verdict jumps straight to the verdict node
    workflow.add_conditional_edges("stroke", _next("kinematics"), ["kinematics", "verdict"])
    workflow.add_conditional_edges("kinematics", _next("singularity"), ["singularity", "verdict"])
    workflow.add_conditional_edges("singularity", _next("tensions"), ["tensions", "verdict"])
    workflow.add_conditional_edges("tensions", _next("interference"), ["interference", "verdict"])
    workflow.add_edge("interference", "verdict")
    workflow.add_edge("verdict", END)

    return workflow.compile()


# Global graph instance
cell_graph = build_cell_graph()


def evaluate_cell(
    geometry: RobotGeometry,
    spec: DesignSpec,
    q: Configuration,
    clearance: float = 0.01,
    threshold: float = SINGULARITY_THRESHOLD,
    check_singularity: bool = True,
) -> Tuple[str, Dict[str, Any]]:
    """Verdict name and final pipeline state for one configuration."""
    initial_state = CellState(
        geometry=geometry,
        spec=spec,
        configuration=q,
        clearance=clearance,
        threshold=threshold,
        check_singularity=check_singularity,
        lengths=None,
        tensions=None,
        min_distance=None,
        verdict="",
        detail="",
    )
    result = cell_graph.invoke(initial_state)
    return result["verdict"], result
