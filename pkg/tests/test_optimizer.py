import pytest

from workspace.feasibility import wrench_feasible_workspace
from workspace.grid import WorkspaceGrid
from workspace.optimizer import ObjectiveContext, apply_parameters, builtin_objective, optimize_parameters


def test_apply_parameters_updates_design(screw):
    spec = apply_parameters(screw.design, {"lead": 0.04, "spring_stiffness": 800.0})
    assert spec.lead == 0.04
    assert spec.springs["s"].stiffness == 800.0
    assert screw.design.lead == 0.05
    with pytest.raises(ValueError):
        apply_parameters(screw.design, {"mass": 1.0})


def test_degenerate_box_evaluates_single_point(screw):
    calls = []

    def objective(params):
        calls.append(params)
        return 1.0

    result = optimize_parameters(screw.geometry, screw.design, ["lead"], objective, {"lead": (0.05, 0.05)}, budget=10)
    assert result.status == "optimal"
    assert result.params == {"lead": 0.05}
    assert len(calls) == 1


def test_monotone_objective_returns_lower_bound(screw):
    result = optimize_parameters(
        screw.geometry, screw.design, ["lead"], lambda p: -p["lead"], {"lead": (0.03, 0.08)}, budget=30
    )
    assert result.params["lead"] == pytest.approx(0.03)
    assert result.value == pytest.approx(-0.03)


def test_unimodal_two_parameter_toy(screw):
    def bowl(p):
        return -((p["spring_stiffness"] - 0.3) ** 2 + (p["lead"] - 0.7) ** 2)

    bounds = {"spring_stiffness": (0.0, 1.0), "lead": (0.0, 1.0)}
    result = optimize_parameters(screw.geometry, screw.design, ["spring_stiffness", "lead"], bowl, bounds, budget=200)
    assert result.params["spring_stiffness"] == pytest.approx(0.3, abs=1e-3)
    assert result.params["lead"] == pytest.approx(0.7, abs=1e-3)
    assert len(result.trace) <= 200


def test_all_infeasible(screw):
    result = optimize_parameters(screw.geometry, screw.design, ["lead"], lambda p: None, {"lead": (0.03, 0.08)}, budget=12)
    assert result.status == "all-infeasible"
    assert result.params is None
    assert 1 <= len(result.trace) <= 12
    assert all(value is None for _, value in result.trace)


def test_optimizer_is_deterministic(screw):
    args = (screw.geometry, screw.design, ["lead"], lambda p: -((p["lead"] - 0.061) ** 2), {"lead": (0.03, 0.08)})
    first = optimize_parameters(*args, budget=25)
    second = optimize_parameters(*args, budget=25)
    assert first.to_dict() == second.to_dict()


def test_builtin_rotational_stroke_objective(screw):
    context = ObjectiveContext(stroke_samples=11, psi_samples=1)
    result = optimize_parameters(
        screw.geometry, screw.design, ["lead"], "rotational-stroke", {"lead": (0.04, 0.08)}, budget=6, context=context
    )
    # a shorter lead turns the payload further over the same stroke
    assert result.params["lead"] == pytest.approx(0.04)


def test_rejects_bad_requests(screw):
    with pytest.raises(ValueError):
        optimize_parameters(screw.geometry, screw.design, ["lead"], lambda p: 0.0, {}, budget=5)
    with pytest.raises(ValueError):
        optimize_parameters(screw.geometry, screw.design, ["lead"], lambda p: 0.0, {"lead": (0.03, 0.08)}, budget=0)
    with pytest.raises(ValueError):
        optimize_parameters(screw.geometry, screw.design, ["lead"], "speed", {"lead": (0.03, 0.08)}, budget=5)


TINY_GRID = WorkspaceGrid((-0.3, 0.3), (-0.3, 0.3), (0.9, 1.1), (3, 3, 3), 1)


def test_builtin_workspace_volume_objective(screw):
    geometry, spec = screw.geometry, screw.design
    context = ObjectiveContext(grid=TINY_GRID)
    volume = builtin_objective(geometry, spec, "workspace-volume", context)

    wmap = wrench_feasible_workspace(geometry, spec, TINY_GRID, context.internal, progress=False)
    assert 0 < wmap.feasible_count <= TINY_GRID.n_cells
    assert volume({"spring_stiffness": 500.0}) == pytest.approx(wmap.feasible_count * TINY_GRID.cell_volume)

    # a weak spring slackens the lower cables, a stiff one overloads them
    assert volume({"spring_stiffness": 50.0}) is None
    assert volume({"spring_stiffness": 10000.0}) is None

    result = optimize_parameters(
        geometry, spec, ["spring_stiffness"], "workspace-volume", {"spring_stiffness": (50.0, 10000.0)},
        budget=8, context=context,
    )
    assert result.status == "optimal"
    assert result.trace[0][1] is None
    assert result.value > 0.0
    assert result.value == max(v for _, v in result.trace if v is not None)
    assert result.value / (TINY_GRID.n_cells * TINY_GRID.cell_volume) <= 1.0
