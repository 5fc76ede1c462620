import pytest
from hypothesis import given
from hypothesis import strategies as st

from cowp.acquirer import (
    Candidate,
    acquire_affordances,
    acquire_state_changes,
    choose_role,
    fits_role,
    object_classes,
    select_best,
)
from cowp.oracle import AlwaysYesBackend, Oracle, PromptKind
from cowp.pddl import Literal
from cowp.planner import Plan, plan
from cowp.sim import load_task

AVAILABLE = [("bowl", "bowl"), ("chair", "chair"), ("glass", "glass"), ("bowl2", "bowl")]


@pytest.fixture(scope="module")
def serve_plan(serve_water):
    return plan(serve_water.domain, serve_water.problem).plan


def test_choose_role_prefers_most_specific_type(serve_plan, serve_water):
    role = choose_role(serve_plan, 0, 4, "cup", serve_water.domain)
    assert role.step == 4 and role.action.schema == "fill" and role.index == 1
    assert choose_role(serve_plan, 0, 4, "spoon", serve_water.domain) is None
    # after fill has run, only less specific slots remain
    assert choose_role(serve_plan, 5, 5, "cup", serve_water.domain).step == 5


def test_object_classes_keep_catalog_order():
    assert object_classes(AVAILABLE) == ["bowl", "chair", "glass"]


def test_fits_role(serve_water):
    d = serve_water.domain
    assert fits_role(d, "cup", "container") and not fits_role(d, "chair", "cup")


def test_affordances_are_backed_by_yes(serve_plan, serve_water, mock_oracle):
    facts = acquire_affordances(serve_plan[4], 1, AVAILABLE, mock_oracle, serve_water.book, serve_water.domain)
    assert [f.object_class for f in facts] == ["bowl", "glass"]
    by_id = {e.id: e for e in mock_oracle.log}
    for f in facts:
        ex = by_id[f.provenance]
        assert ex.kind is PromptKind.AFFORDANCE and ex.verdict.is_yes
        assert f.action == "fill" and f.role == 1
    # one query per distinct class
    assert len(mock_oracle.log) == 3


def test_fitting_class_needs_no_query(serve_plan, serve_water, mock_oracle):
    facts = acquire_affordances(serve_plan[3], 1, [("mug", "cup")], mock_oracle, serve_water.book, serve_water.domain)
    assert len(facts) == 1 and facts[0].provenance is None
    assert len(mock_oracle.log) == 0


def test_affordances_need_objects(serve_plan, serve_water, mock_oracle):
    with pytest.raises(ValueError):
        acquire_affordances(serve_plan[4], 1, [], mock_oracle, serve_water.book, serve_water.domain)


@given(st.lists(st.sampled_from(["bowl", "chair", "glass", "mug", "plate", "sponge"]), max_size=8))
def test_query_budget(serve_plan, serve_water, classes):
    oracle = Oracle(AlwaysYesBackend())
    avail = [(f"{c}{i}", c) for i, c in enumerate(classes)]
    if not avail:
        return
    facts = acquire_affordances(serve_plan[4], 1, avail, oracle, serve_water.book, serve_water.domain)
    assert len(oracle.log) <= len(set(classes))
    assert len(facts) == len(set(classes))


def test_state_changes(mock_oracle):
    f = load_task("Set table")
    d, p = f.domain, f.problem
    facts = acquire_state_changes(Literal("is_dirty", ("plate",)), f.repair_actions, mock_oracle, f.book, d, p)
    assert len(facts) == 1 and len(mock_oracle.log) == 1
    fact = facts[0]
    assert fact.action == "wipe" and fact.object_class == "plate" and fact.role == 1
    assert fact.clears == Literal("is_dirty", ("?o",))
    ex = mock_oracle.log[0]
    assert ex.id == fact.provenance and ex.verdict.is_yes and "that is dirty?" in ex.prompt
    assert acquire_state_changes(Literal("is_broken", ("plate",)), f.repair_actions, mock_oracle, f.book, d, p) == []
    assert acquire_state_changes(Literal("is_dirty", ("ghost",)), ("wipe",), mock_oracle, f.book, d, p) == []


def test_select_best_returns_member(mock_oracle):
    cands = [Candidate("bowl", Plan(())), Candidate("glass", Plan(()))]
    best, ex_id = select_best(cands, "serving water", "Cup is dirty.", mock_oracle)
    assert best.label == "glass" and ex_id == mock_oracle.log[0].id
    assert mock_oracle.log[0].prompt.endswith("most suitable for serving water, if the cup is dirty?")


def test_select_best_single_and_empty(mock_oracle):
    only = Candidate("bowl", Plan(()))
    assert select_best([only], "serving water", "Cup is dirty.", mock_oracle) == (only, None)
    assert len(mock_oracle.log) == 0
    with pytest.raises(ValueError):
        select_best([], "serving water", "Cup is dirty.", mock_oracle)


class Evasive:
    name = "evasive"

    def complete(self, prompt, kind):
        return "None of them."


@given(st.lists(st.sampled_from(["bowl", "glass", "mug", "plate", "vase"]), min_size=2, max_size=5, unique=True))
def test_select_best_always_returns_a_candidate(labels):
    cands = [Candidate(c, Plan(())) for c in labels]
    for backend in (AlwaysYesBackend(), Evasive()):
        best, _ = select_best(cands, "serving water", "the cup is dirty", Oracle(backend))
        assert best in cands
