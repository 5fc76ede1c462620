import pytest
from hypothesis import given
from hypothesis import strategies as st

from cowp.monitor import monitor_plan, situation_clause
from cowp.oracle import AlwaysYesBackend, Oracle, ReplayBackend
from cowp.planner import plan


class Scripted:
    """Answers Yes except at the given query positions."""

    name = "scripted"

    def __init__(self, no_at=()):
        self.no_at, self.calls = set(no_at), 0

    def complete(self, prompt, kind):
        self.calls += 1
        return "No." if self.calls - 1 in self.no_at else "Yes."


@pytest.fixture(scope="module")
def serve_plan(serve_water):
    return plan(serve_water.domain, serve_water.problem).plan


@pytest.mark.parametrize(
    "text, clause",
    [
        ("Cup is broken.", "the cup is broken"),
        ("The faucet has no water!", "the faucet has no water"),
        ("There is no water.", "there is no water"),
        ("TV is off.", "the TV is off"),
        ("  ", ""),
    ],
)
def test_situation_clause(text, clause):
    assert situation_clause(text) == clause


def test_dirty_cup_blocks_fill(serve_plan, serve_water, mock_oracle):
    v = monitor_plan(serve_plan, "Cup is dirty.", mock_oracle, serve_water.book)
    assert not v and v.step == 4 and v.action.schema == "fill"
    assert v.queries == 5 == len(mock_oracle.log)
    assert mock_oracle.log[4].prompt.endswith("fill a cup with water, if the cup is dirty?")
    assert v.exchange_id == mock_oracle.log[4].id


def test_no_situation_asks_nothing(serve_plan, serve_water, mock_oracle):
    assert monitor_plan(serve_plan, None, mock_oracle, serve_water.book)
    assert monitor_plan(serve_plan, " ", mock_oracle, serve_water.book)
    assert len(mock_oracle.log) == 0


def test_always_yes_is_feasible(serve_plan, serve_water):
    oracle = Oracle(AlwaysYesBackend())
    v = monitor_plan(serve_plan, "Cup is broken.", oracle, serve_water.book)
    assert v and v.queries == len(serve_plan)


@given(st.integers(0, 7), st.integers(0, 7), st.sets(st.integers(0, 7)))
def test_queries_bounded_and_stop_at_first_no(serve_plan, serve_water, a, b, no_at):
    start, end = min(a, b), max(a, b)
    backend = Scripted(no_at)
    v = monitor_plan(serve_plan, "Cup is dirty.", Oracle(backend), serve_water.book, start, end)
    assert backend.calls <= end - start
    blocked = sorted(i for i in no_at if i < end - start)
    if blocked:
        assert not v and v.step == start + blocked[0] and backend.calls == blocked[0] + 1
    else:
        assert v and backend.calls == end - start


def test_replay_reproduces_verdict(serve_plan, serve_water, mock_oracle):
    v = monitor_plan(serve_plan, "Faucet has no water.", mock_oracle, serve_water.book, start=1)
    replay = Oracle(ReplayBackend(mock_oracle.log.items()))
    assert monitor_plan(serve_plan, "Faucet has no water.", replay, serve_water.book, start=1) == v


@pytest.mark.parametrize("start, end", [(-1, None), (3, 2), (0, 8)])
def test_bounds(serve_plan, serve_water, mock_oracle, start, end):
    with pytest.raises(ValueError):
        monitor_plan(serve_plan, "Cup is dirty.", mock_oracle, serve_water.book, start, end)
