# File: src/harness/scenario_io.py
"""
Scenario files: one JSON document with `geometry`, `design` and `simulation`.

Purpose:
    Parse a scenario into RobotGeometry / DesignSpec / SimulationSettings,
    rejecting unknown keys and reporting the failing field as a dotted pointer
    (e.g. "design.springs.s.stiffness").

Usage:
    from harness.scenario_io import load_scenario
    scenario = load_scenario("scenarios/canonical.json")
"""

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Tuple, Union

import numpy as np

from mechanism.model import (
    ApertureMap,
    Attachment,
    BodyInertia,
    BodyShape,
    DesignSpec,
    RobotGeometry,
    SpringParams,
    Variant,
    WinderMap,
)
from mechanism.validation import validate_scenario
from utils.config import default_scenario_path
from utils.errors import ScenarioError
from utils.run_logger import get_logger
from workspace.grid import WorkspaceGrid

logger = get_logger()


# -------------------------------------------------
# Simulation block
# -------------------------------------------------
@dataclass(frozen=True)
class RotationSweep:
    stroke_samples: int = 81
    psi_range: float = 0.3
    psi_samples: int = 7


@dataclass(frozen=True)
class SimulationSettings:
    dt: float = 1e-3
    control_period: float = 1e-2
    clearance: float = 0.01
    cable_stiffness: float = 1e5
    cable_damping: float = 50.0
    singularity_threshold: float = 1e6
    characteristic_length: float = 0.15
    center: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    working_internal: Tuple[float, float] = (0.10, 0.0)
    grid: WorkspaceGrid = field(
        default_factory=lambda: WorkspaceGrid((-0.6, 0.6), (-0.6, 0.6), (0.7, 1.3))
    )
    rotation_sweep: RotationSweep = field(default_factory=RotationSweep)
    seed: int = 0

    def with_updates(self, **changes) -> "SimulationSettings":
        return replace(self, **changes)


@dataclass(frozen=True)
class Scenario:
    geometry: RobotGeometry
    design: DesignSpec
    simulation: SimulationSettings
    source: Optional[Path] = None

    def validate(self):
        return validate_scenario(self.geometry, self.design)


# -------------------------------------------------
# Field helpers
# -------------------------------------------------
def _require_mapping(value: Any, path: str) -> Dict[str, Any]:
    if not isinstance(value, dict):
        raise ScenarioError("expected an object", path)
    return value


def _check_keys(block: Dict[str, Any], path: str, required: Iterable[str], optional: Iterable[str] = ()):
    required = tuple(required)
    allowed = set(required) | set(optional)
    for key in block:
        if key not in allowed:
            raise ScenarioError("unknown key", f"{path}.{key}" if path else key)
    for key in required:
        if key not in block:
            raise ScenarioError("missing required key", f"{path}.{key}" if path else key)


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError("expected a number", path)
    return float(value)


def _integer(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError("expected an integer", path)
    return value


def _vector(value: Any, path: str, length: Optional[int] = None) -> np.ndarray:
    if not isinstance(value, (list, tuple)):
        raise ScenarioError("expected an array", path)
    if length is not None and len(value) != length:
        raise ScenarioError(f"expected {length} entries, got {len(value)}", path)
    return np.array([_number(v, f"{path}[{i}]") for i, v in enumerate(value)])


def _pair(value: Any, path: str) -> Tuple[float, float]:
    lo, hi = _vector(value, path, 2)
    return float(lo), float(hi)


# -------------------------------------------------
# Blocks
# -------------------------------------------------
def _parse_geometry(raw: Any) -> RobotGeometry:
    block = _require_mapping(raw, "geometry")
    _check_keys(block, "geometry", ("anchors", "attachments", "bodies", "rod_radius"))

    anchors_raw = block["anchors"]
    if not isinstance(anchors_raw, list):
        raise ScenarioError("expected an array of points", "geometry.anchors")
    anchors = np.array([_vector(a, f"geometry.anchors[{i}]", 3) for i, a in enumerate(anchors_raw)])

    attachments_raw = block["attachments"]
    if not isinstance(attachments_raw, list):
        raise ScenarioError("expected an array", "geometry.attachments")
    attachments = []
    for i, item in enumerate(attachments_raw):
        path = f"geometry.attachments[{i}]"
        item = _require_mapping(item, path)
        _check_keys(item, path, ("body", "local"))
        if not isinstance(item["body"], str):
            raise ScenarioError("expected a body name", f"{path}.body")
        attachments.append(Attachment(item["body"], _vector(item["local"], f"{path}.local", 3)))

    bodies = {}
    for name, shape in _require_mapping(block["bodies"], "geometry.bodies").items():
        path = f"geometry.bodies.{name}"
        shape = _require_mapping(shape, path)
        _check_keys(shape, path, ("half_extents", "offset"), ("rod_tips",))
        tips = shape.get("rod_tips", [])
        if not isinstance(tips, list):
            raise ScenarioError("expected an array of points", f"{path}.rod_tips")
        bodies[name] = BodyShape(
            half_extents=_vector(shape["half_extents"], f"{path}.half_extents", 3),
            offset=_number(shape["offset"], f"{path}.offset"),
            rod_tips=tuple(_vector(t, f"{path}.rod_tips[{i}]", 3) for i, t in enumerate(tips)),
        )

    return RobotGeometry(
        anchors=anchors.reshape(-1, 3),
        attachments=tuple(attachments),
        bodies=bodies,
        rod_radius=_number(block["rod_radius"], "geometry.rod_radius"),
    )


def _parse_design(raw: Any) -> DesignSpec:
    block = _require_mapping(raw, "design")
    _check_keys(
        block,
        "design",
        ("variant", "springs", "stroke_limits", "tension_bounds", "masses"),
        ("gravity", "lead", "winder", "aperture_map"),
    )
    try:
        variant = Variant(block["variant"])
    except ValueError:
        choices = ", ".join(v.value for v in Variant)
        raise ScenarioError(f"unknown variant (expected one of {choices})", "design.variant")

    springs = {}
    for name, item in _require_mapping(block["springs"], "design.springs").items():
        path = f"design.springs.{name}"
        item = _require_mapping(item, path)
        _check_keys(item, path, ("stiffness", "free_extension", "min_extension"), ("preload",))
        springs[name] = SpringParams(
            stiffness=_number(item["stiffness"], f"{path}.stiffness"),
            free_extension=_number(item["free_extension"], f"{path}.free_extension"),
            min_extension=_number(item["min_extension"], f"{path}.min_extension"),
            preload=_number(item.get("preload", 0.0), f"{path}.preload"),
        )

    stroke_limits = {
        name: _pair(value, f"design.stroke_limits.{name}")
        for name, value in _require_mapping(block["stroke_limits"], "design.stroke_limits").items()
    }

    masses = {}
    for name, item in _require_mapping(block["masses"], "design.masses").items():
        path = f"design.masses.{name}"
        item = _require_mapping(item, path)
        _check_keys(item, path, ("mass", "inertia"))
        rows = item["inertia"]
        if not isinstance(rows, list) or len(rows) != 3:
            raise ScenarioError("expected a 3x3 matrix", f"{path}.inertia")
        inertia = np.array([_vector(r, f"{path}.inertia[{i}]", 3) for i, r in enumerate(rows)])
        masses[name] = BodyInertia(_number(item["mass"], f"{path}.mass"), inertia)

    winder = None
    if block.get("winder") is not None:
        item = _require_mapping(block["winder"], "design.winder")
        _check_keys(item, "design.winder", ("theta_max", "stroke_period"))
        winder = WinderMap(
            _number(item["theta_max"], "design.winder.theta_max"),
            _number(item["stroke_period"], "design.winder.stroke_period"),
        )

    aperture_map = None
    if block.get("aperture_map") is not None:
        item = _require_mapping(block["aperture_map"], "design.aperture_map")
        _check_keys(item, "design.aperture_map", ("stroke", "aperture"))
        aperture_map = ApertureMap(
            tuple(float(v) for v in _vector(item["stroke"], "design.aperture_map.stroke")),
            tuple(float(v) for v in _vector(item["aperture"], "design.aperture_map.aperture")),
        )

    lead = block.get("lead")
    return DesignSpec(
        variant=variant,
        springs=springs,
        stroke_limits=stroke_limits,
        tension_bounds=_pair(block["tension_bounds"], "design.tension_bounds"),
        masses=masses,
        gravity=_vector(block.get("gravity", [0.0, 0.0, -9.81]), "design.gravity", 3),
        lead=None if lead is None else _number(lead, "design.lead"),
        winder=winder,
        aperture_map=aperture_map,
    )


def _parse_simulation(raw: Any) -> SimulationSettings:
    if raw is None:
        return SimulationSettings()
    block = _require_mapping(raw, "simulation")
    scalars = (
        "dt",
        "control_period",
        "clearance",
        "cable_stiffness",
        "cable_damping",
        "singularity_threshold",
        "characteristic_length",
    )
    _check_keys(
        block,
        "simulation",
        (),
        scalars + ("center", "working_internal", "grid", "rotation_sweep", "seed"),
    )
    changes: Dict[str, Any] = {}
    for key in scalars:
        if key in block:
            value = _number(block[key], f"simulation.{key}")
            if value < 0 or (value == 0 and key not in ("clearance", "cable_damping")):
                raise ScenarioError("must be positive", f"simulation.{key}")
            changes[key] = value
    if "center" in block:
        changes["center"] = _vector(block["center"], "simulation.center", 3)
    if "working_internal" in block:
        changes["working_internal"] = _pair(block["working_internal"], "simulation.working_internal")
    if "seed" in block:
        changes["seed"] = _integer(block["seed"], "simulation.seed")

    if "grid" in block:
        item = _require_mapping(block["grid"], "simulation.grid")
        _check_keys(item, "simulation.grid", ("x", "y", "z"), ("resolution", "yaw_count"))
        resolution = tuple(
            _integer(v, f"simulation.grid.resolution[{i}]")
            for i, v in enumerate(item.get("resolution", [21, 21, 11]))
        )
        if len(resolution) != 3:
            raise ScenarioError("expected 3 entries", "simulation.grid.resolution")
        try:
            changes["grid"] = WorkspaceGrid(
                _pair(item["x"], "simulation.grid.x"),
                _pair(item["y"], "simulation.grid.y"),
                _pair(item["z"], "simulation.grid.z"),
                resolution,
                _integer(item.get("yaw_count", 8), "simulation.grid.yaw_count"),
            )
        except ValueError as e:
            raise ScenarioError(str(e), "simulation.grid")

    if "rotation_sweep" in block:
        item = _require_mapping(block["rotation_sweep"], "simulation.rotation_sweep")
        _check_keys(item, "simulation.rotation_sweep", (), ("stroke_samples", "psi_range", "psi_samples"))
        defaults = RotationSweep()
        changes["rotation_sweep"] = RotationSweep(
            _integer(item.get("stroke_samples", defaults.stroke_samples), "simulation.rotation_sweep.stroke_samples"),
            _number(item.get("psi_range", defaults.psi_range), "simulation.rotation_sweep.psi_range"),
            _integer(item.get("psi_samples", defaults.psi_samples), "simulation.rotation_sweep.psi_samples"),
        )
    return SimulationSettings(**changes)


# -------------------------------------------------
# Public entry points
# -------------------------------------------------
def parse_scenario(document: Any, source: Optional[Path] = None) -> Scenario:
    """Build a Scenario from an already-decoded JSON document (structure only)."""
    root = _require_mapping(document, "")
    _check_keys(root, "", ("geometry", "design"), ("simulation",))
    return Scenario(
        geometry=_parse_geometry(root["geometry"]),
        design=_parse_design(root["design"]),
        simulation=_parse_simulation(root.get("simulation")),
        source=source,
    )


def load_scenario(path: Union[str, Path, None] = None, validate: bool = True) -> Scenario:
    """Read and parse a scenario file; with `validate`, invariant violations raise ScenarioError."""
    path = Path(path) if path is not None else default_scenario_path()
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except FileNotFoundError:
        raise ScenarioError(f"scenario file not found: {path}")
    except json.JSONDecodeError as e:
        raise ScenarioError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}")

    scenario = parse_scenario(document, source=path)
    logger.info(f"📂 Loaded scenario {path.name} ({scenario.design.variant.value})")
    if validate:
        problems = scenario.validate()
        if problems:
            raise ScenarioError("; ".join(problems), "scenario")
    return scenario
