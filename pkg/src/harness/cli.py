# File: src/harness/cli.py
"""
Command-line harness.

Usage:
    python main.py validate --scenario scenarios/canonical.json
    python main.py ik --pose 0 0 1 --internal 0 0
    python main.py workspace --grid 11 11 5 --out workspace.csv

Every subcommand prints one JSON document on stdout; tables go to --out as
CSV. Exit codes: 0 ok, 1 invalid input, 2 numerical failure, 64 usage error.
"""

import argparse
import sys
from typing import List, Optional

import numpy as np
import pandas as pd

from harness.reports import configuration_dict, emit, vector_frame, write_csv
from harness.scenario_io import Scenario, load_scenario
from kinematics.cable_kinematics import (
    condition_number,
    conditioning_sweep,
    detect_singularities,
    inverse_kinematics,
    jacobian,
    payload_condition,
    singular_regions,
    solve_forward,
)
from mechanism.maps import rotation_coordinate
from mechanism.model import Configuration
from motion.dynamics import CableModel, SimState, hold_commands
from motion.rollout import kinematic_rollout
from motion.trajectory import plan_trajectory, sample, sample_times
from statics.tension_solver import generalized_load, solve_tensions
from utils.errors import (
    CableRobotError,
    CoilBindError,
    ConvergenceError,
    DivergenceError,
    InfeasiblePoseError,
    InvalidWaypointError,
    ScenarioError,
    SingularityError,
    StrokeError,
)
from utils.run_logger import get_logger
from workspace.feasibility import symmetry_report, wrench_feasible_workspace
from workspace.interference import check_interference
from workspace.optimizer import ObjectiveContext, optimize_parameters
from workspace.rotation import rotational_workspace

logger = get_logger()

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2
EXIT_USAGE = 64


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


# -------------------------------------------------
# Helpers
# -------------------------------------------------
def _configuration(args, scenario: Scenario) -> Configuration:
    internal = args.internal if args.internal is not None else scenario.simulation.working_internal
    pose = args.pose if args.pose is not None else scenario.simulation.center
    return Configuration.at(pose, internal, args.yaw)


def _rng(args, scenario: Scenario) -> np.random.Generator:
    seed = args.seed if args.seed is not None else scenario.simulation.seed
    return np.random.default_rng(seed)


def _clearance(args, scenario: Scenario) -> float:
    return args.clearance if args.clearance is not None else scenario.simulation.clearance


def _threshold(args, scenario: Scenario) -> float:
    return args.threshold if args.threshold is not None else scenario.simulation.singularity_threshold


# -------------------------------------------------
# Subcommands
# -------------------------------------------------
def cmd_validate(args, scenario: Scenario) -> int:
    problems = scenario.validate()
    emit({"valid": not problems, "violations": problems})
    return EXIT_OK if not problems else EXIT_INVALID


def cmd_ik(args, scenario: Scenario) -> int:
    q = _configuration(args, scenario)
    lengths = inverse_kinematics(scenario.geometry, scenario.design, q)
    write_csv(vector_frame("length", lengths), args.out)
    emit({"configuration": configuration_dict(q), "lengths": lengths})
    return EXIT_OK


def cmd_fk(args, scenario: Scenario) -> int:
    geometry, spec = scenario.geometry, scenario.design
    target = _configuration(args, scenario)
    lengths = np.asarray(args.lengths) if args.lengths else inverse_kinematics(geometry, spec, target)
    guess = target
    if args.perturb > 0.0:
        noise = _rng(args, scenario).uniform(-args.perturb, args.perturb, size=8)
        noise[6:] = 0.0
        guess = target.retract(noise)
    result = solve_forward(geometry, spec, lengths, guess, _threshold(args, scenario))
    emit(
        {
            "configuration": configuration_dict(result.configuration),
            "residual": result.residual,
            "iterations": result.iterations,
        }
    )
    return EXIT_OK


def cmd_statics(args, scenario: Scenario) -> int:
    geometry, spec = scenario.geometry, scenario.design
    q = _configuration(args, scenario)
    load = generalized_load(geometry, spec, q)
    result = solve_tensions(jacobian(geometry, spec, q), load, spec.tension_bounds)
    write_csv(vector_frame("tension", result.tensions), args.out)
    emit({"configuration": configuration_dict(q), "load": load, **result.to_dict()})
    return EXIT_OK if result.feasible or not args.strict else EXIT_NUMERICAL


def cmd_jacobian(args, scenario: Scenario) -> int:
    geometry, spec = scenario.geometry, scenario.design
    sim = scenario.simulation
    q = _configuration(args, scenario)
    J = jacobian(geometry, spec, q)
    payload = {
        "jacobian": J,
        "condition_number": condition_number(J, sim.characteristic_length, spec=spec),
        "payload_condition_number": payload_condition(geometry, spec, q, sim.characteristic_length),
    }
    if args.radii:
        payload["conditioning_sweep"] = [
            {"rod_radius": r, "condition_number": c}
            for r, c in conditioning_sweep(geometry, spec, q, args.radii, sim.characteristic_length)
        ]
    if args.sweep:
        idx = rotation_coordinate(spec)
        name = spec.variant.internal_names[idx]
        lo, hi = spec.stroke_limits.get(name, spec.stroke_limits[spec.variant.translational[0]])
        values = np.linspace(lo, hi, args.sweep, endpoint=False)
        path = []
        for v in values:
            internal = list(q.internal)
            internal[idx] = v
            path.append(Configuration(q.base_pose, tuple(internal)))
        flagged = detect_singularities(geometry, spec, path, _threshold(args, scenario), sim.characteristic_length)
        payload["singular_indices"] = flagged
        payload["singular_regions"] = [list(r) for r in singular_regions(flagged)]
        payload["singular_strokes"] = [float(values[i]) for i in flagged]
    write_csv(pd.DataFrame(J, columns=[f"q{j}" for j in range(J.shape[1])]), args.out)
    emit(payload)
    return EXIT_OK


def cmd_workspace(args, scenario: Scenario) -> int:
    sim = scenario.simulation
    grid = sim.grid
    if args.grid:
        if len(args.grid) not in (3, 4):
            raise _UsageError("--grid takes NX NY NZ [NYAW]")
        nx, ny, nz = args.grid[:3]
        yaw_count = args.grid[3] if len(args.grid) == 4 else 1
        grid = grid.with_resolution(nx, ny, nz, yaw_count)
    internal = args.internal if args.internal is not None else sim.working_internal
    wmap = wrench_feasible_workspace(
        scenario.geometry, scenario.design, grid, internal, _clearance(args, scenario), _threshold(args, scenario)
    )
    if args.out:
        wmap.to_csv(args.out)
    summary = wmap.to_dict()
    summary["symmetry"] = symmetry_report(wmap)
    emit(summary)
    return EXIT_OK


def cmd_rotws(args, scenario: Scenario) -> int:
    sim = scenario.simulation
    position = args.pose if args.pose is not None else sim.center
    rot = rotational_workspace(
        scenario.geometry,
        scenario.design,
        position,
        _clearance(args, scenario),
        sim.rotation_sweep.stroke_samples,
        sim.rotation_sweep.psi_range,
        sim.rotation_sweep.psi_samples,
        fixed_internal=sim.working_internal[0],
    )
    write_csv(pd.DataFrame(rot.intervals, columns=["lo", "hi"]), args.out)
    emit(rot.to_dict())
    return EXIT_OK


def cmd_interference(args, scenario: Scenario) -> int:
    q = _configuration(args, scenario)
    report = check_interference(
        scenario.geometry, scenario.design, q, _clearance(args, scenario)
    )
    if args.out:
        write_csv(pd.DataFrame([e.to_dict() for e in report.entries]), args.out)
    emit(report.to_dict())
    return EXIT_OK


def _trajectory(args, scenario: Scenario):
    start = _configuration(args, scenario)
    goal_pose = args.to if args.to is not None else start.base_pose.position
    goal_internal = args.to_internal if args.to_internal is not None else start.internal
    goal = Configuration.at(goal_pose, goal_internal, args.yaw)
    return plan_trajectory([start, goal], [args.duration], scenario.design)


def cmd_traj(args, scenario: Scenario) -> int:
    traj = _trajectory(args, scenario)
    period = args.period or scenario.simulation.control_period
    rows = []
    for t in sample_times(traj, period):
        q, v, _ = sample(traj, t)
        rows.append([t, *q.as_vector(), *v])
    columns = ["time"] + [f"q{j}" for j in range(8)] + [f"v{j}" for j in range(8)]
    frame = pd.DataFrame(rows, columns=columns)
    write_csv(frame, args.out)
    emit({"duration": traj.duration, "samples": len(frame), "waypoints": list(traj.waypoints)})
    return EXIT_OK


def cmd_rollout(args, scenario: Scenario) -> int:
    sim = scenario.simulation
    traj = _trajectory(args, scenario)
    cables = CableModel(sim.cable_stiffness, sim.cable_damping)
    q0 = traj.waypoints[0]
    log = kinematic_rollout(
        scenario.geometry,
        scenario.design,
        traj,
        control_period=args.period or sim.control_period,
        dt=args.dt or sim.dt,
        cables=cables,
        compensate=not args.no_compensation,
        initial=SimState(q0),
    )
    if args.out:
        log.to_csv(args.out)
    summary = log.summary()
    summary["hold_commands"] = hold_commands(scenario.geometry, scenario.design, q0, cables.stiffness)
    emit(summary)
    return EXIT_OK


def cmd_optimize(args, scenario: Scenario) -> int:
    sim = scenario.simulation
    bounds = {name: (lo, hi) for name, lo, hi in ((b[0], float(b[1]), float(b[2])) for b in args.bound)}
    context = ObjectiveContext(
        position=tuple(args.pose if args.pose is not None else sim.center),
        clearance=_clearance(args, scenario),
        grid=sim.grid,
        internal=sim.working_internal,
        stroke_samples=sim.rotation_sweep.stroke_samples,
        psi_range=sim.rotation_sweep.psi_range,
        psi_samples=sim.rotation_sweep.psi_samples,
    )
    result = optimize_parameters(
        scenario.geometry,
        scenario.design,
        list(bounds),
        args.objective,
        bounds,
        budget=args.budget,
        context=context,
    )
    if args.out:
        write_csv(pd.DataFrame([{**p, "value": v} for p, v in result.trace]), args.out)
    emit(result.to_dict())
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "ik": cmd_ik,
    "fk": cmd_fk,
    "statics": cmd_statics,
    "jacobian": cmd_jacobian,
    "workspace": cmd_workspace,
    "rotws": cmd_rotws,
    "interference": cmd_interference,
    "traj": cmd_traj,
    "rollout": cmd_rollout,
    "optimize": cmd_optimize,
}


# -------------------------------------------------
# Parser
# -------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--scenario", help="Scenario JSON file (default: $CDPR_SCENARIO or scenarios/canonical.json)")
    common.add_argument("--out", help="Write the tabular result as CSV to this path")
    common.add_argument("--seed", type=int, default=None, help="Seed for randomized sampling")
    common.add_argument("--pose", type=float, nargs=3, metavar=("X", "Y", "Z"), help="Reference-body position (m)")
    common.add_argument("--yaw", type=float, default=0.0, help="Reference-body yaw (rad)")
    common.add_argument("--internal", type=float, nargs=2, metavar=("A", "B"), help="Internal coordinates")
    common.add_argument("--clearance", type=float, default=None, help="Interference clearance (m)")
    common.add_argument("--threshold", type=float, default=None, help="Singularity condition-number threshold")

    parser = _Parser(prog="cdpr", description="Reconfigurable end-effector cable robot toolkit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    sub.add_parser("validate", parents=[common], help="Check scenario invariants")
    sub.add_parser("ik", parents=[common], help="Cable lengths of a configuration")

    fk = sub.add_parser("fk", parents=[common], help="Configuration from cable lengths")
    fk.add_argument("--lengths", type=float, nargs=8, help="Measured cable lengths (default: IK of --pose)")
    fk.add_argument("--perturb", type=float, default=0.0, help="Uniform warm-start perturbation (m / rad)")

    statics = sub.add_parser("statics", parents=[common], help="Generalized load and unique tensions")
    statics.add_argument("--strict", action="store_true", help="Exit 2 when tensions violate bounds")

    jac = sub.add_parser("jacobian", parents=[common], help="Length Jacobian and conditioning")
    jac.add_argument("--radii", type=float, nargs="+", help="Rod radii for a conditioning sweep")
    jac.add_argument("--sweep", type=int, default=0, help="Samples of a singularity sweep over the stroke")

    ws = sub.add_parser("workspace", parents=[common], help="Wrench-feasible workspace map")
    ws.add_argument("--grid", type=int, nargs="+", metavar="N", help="NX NY NZ [NYAW]")

    sub.add_parser("rotws", parents=[common], help="Rotational workspace at a position")
    sub.add_parser("interference", parents=[common], help="Cable/cable and cable/body distances")

    for name, help_text in (("traj", "Quintic trajectory samples"), ("rollout", "Kinematic control rollout")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--to", type=float, nargs=3, metavar=("X", "Y", "Z"), help="Goal position (m)")
        p.add_argument("--to-internal", type=float, nargs=2, metavar=("A", "B"), help="Goal internal coordinates")
        p.add_argument("--duration", type=float, default=1.0, help="Segment duration (s)")
        p.add_argument("--period", type=float, default=None, help="Sampling / control period (s)")
        if name == "rollout":
            p.add_argument("--dt", type=float, default=None, help="Integration step (s)")
            p.add_argument("--no-compensation", action="store_true", help="Command pure IK lengths")

    opt = sub.add_parser("optimize", parents=[common], help="Spring / lead parameter optimization")
    opt.add_argument(
        "--bound", nargs=3, action="append", required=True, metavar=("PARAM", "LO", "HI"),
        help="Free parameter and its bounds (spring_stiffness, spring_free_extension, lead)",
    )
    opt.add_argument("--objective", choices=["rotational-stroke", "workspace-volume"], default="rotational-stroke")
    opt.add_argument("--budget", type=int, default=40)
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """Parse argv, run one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        logger.error(f"❌ Usage error: {e}")
        return EXIT_USAGE
    except SystemExit as e:  # --help
        return EXIT_OK if not e.code else EXIT_USAGE

    try:
        scenario = load_scenario(args.scenario, validate=args.command != "validate")
        return COMMANDS[args.command](args, scenario)
    except _UsageError as e:
        logger.error(f"❌ Usage error: {e}")
        return EXIT_USAGE
    except (ScenarioError, InfeasiblePoseError, InvalidWaypointError, StrokeError, CoilBindError) as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        emit({"error": type(e).__name__, "message": str(e), "field": getattr(e, "field", None)})
        return EXIT_INVALID
    except (SingularityError, ConvergenceError, DivergenceError) as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        emit({"error": type(e).__name__, "message": str(e)})
        return EXIT_NUMERICAL
    except CableRobotError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        emit({"error": type(e).__name__, "message": str(e)})
        return EXIT_NUMERICAL
    except ValueError as e:
        logger.error(f"❌ Invalid argument: {e}")
        emit({"error": "ValueError", "message": str(e)})
        return EXIT_INVALID


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
