import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cowp.pddl import Literal
from cowp.planner import Plan, PlanStatus, parse_plan_text, plan, validate_plan
from cowp.sim import load_all_tasks
from cowp.surgery import AffordanceFact, Mutation, add_precondition, apply_script

from support import bfs_reachable, random_planning_instance

SERVE_PLAN = [
    "find robot cup kitchen",
    "find_faucet robot faucet kitchen",
    "turnon robot faucet kitchen",
    "grasp robot cup kitchen",
    "fill robot cup faucet kitchen",
    "move robot cup kitchen dining",
    "place robot cup table dining",
]


def test_serve_water_plan_is_the_reference_plan(serve_water):
    out = plan(serve_water.domain, serve_water.problem)
    assert out.status is PlanStatus.FOUND
    assert out.plan.names() == SERVE_PLAN
    assert out.plan.format().splitlines()[0] == "S1: find robot cup kitchen"


@pytest.mark.parametrize("fixture", load_all_tasks(), ids=lambda f: f.slug)
def test_fixture_plans_validate(fixture):
    out = plan(fixture.domain, fixture.problem)
    assert out.found
    assert validate_plan(fixture.domain, fixture.problem, out.plan)


def test_plan_is_deterministic(serve_water):
    runs = {tuple(plan(serve_water.domain, serve_water.problem).plan.names()) for _ in range(3)}
    assert len(runs) == 1


def test_budget_exhaustion(serve_water):
    out = plan(serve_water.domain, serve_water.problem, node_budget=2)
    assert out.status is PlanStatus.RESOURCE_EXHAUSTED


def test_dirty_cup_has_no_plan(serve_water):
    d = add_precondition(serve_water.domain, "fill", Literal("is_dirty", ("?c",), False))
    p = serve_water.problem.with_init(serve_water.problem.init + (Literal("is_dirty", ("cup",)),))
    assert plan(d, p).status is PlanStatus.NO_SOLUTION


def test_validate_reports_failing_step(serve_water):
    steps = parse_plan_text("\n".join(SERVE_PLAN[1:]), serve_water.domain, serve_water.problem)
    report = validate_plan(serve_water.domain, serve_water.problem, steps)
    assert not report
    assert report.failed_step == 2  # grasp needs the cup found first
    assert report.failed_literal == Literal("found", ("cup",))


def test_validate_reports_unmet_goal(serve_water):
    steps = parse_plan_text("\n".join(SERVE_PLAN[:-1]), serve_water.domain, serve_water.problem)
    report = validate_plan(serve_water.domain, serve_water.problem, steps)
    assert report.failed_step == 6 and report.failed_literal == Literal("water_served", ("table",))


def test_parse_plan_text_forms(serve_water):
    a = parse_plan_text("S1: find robot cup kitchen\n(grasp robot cup kitchen)", serve_water.domain, serve_water.problem)
    assert [s.schema for s in a] == ["find", "grasp"]
    with pytest.raises(ValueError):
        parse_plan_text("S1: fly robot cup", serve_water.domain, serve_water.problem)


def test_parse_plan_text_resolves_clones(serve_water):
    d, p, _ = apply_script(
        [
            Mutation("action-extended", fact=AffordanceFact("bowl", "fill", 1)),
            Mutation("init-fact-asserted", literal=Literal("obj_at", ("bowl", "kitchen")), object_types=(("bowl", "bowl"),)),
        ],
        serve_water.domain,
        serve_water.problem,
    )
    steps = parse_plan_text("fill robot bowl faucet kitchen\nfill robot cup faucet kitchen", d, p)
    assert [s.schema for s in steps] == ["fill__bowl", "fill"]


def test_bfs_equivalence_sample():
    rng = np.random.default_rng(2024)
    for _ in range(40):
        d, p = random_planning_instance(rng)
        assert plan(d, p).found == bfs_reachable(d, p)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_found_plans_are_sound(seed):
    d, p = random_planning_instance(np.random.default_rng(seed))
    out = plan(d, p)
    assert out.status is not PlanStatus.RESOURCE_EXHAUSTED
    if out.found:
        assert validate_plan(d, p, out.plan)
    assert out.found == bfs_reachable(d, p)


def test_empty_plan_when_goal_holds(serve_water):
    p = serve_water.problem.with_init(serve_water.problem.init + (Literal("water_served", ("table",)),))
    out = plan(serve_water.domain, p)
    assert out.found and len(out.plan) == 0 and out.plan == Plan(())
