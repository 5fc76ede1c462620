import os

import pytest

from cowp.oracle import Oracle, MockBackend
from cowp.sim import default_catalog, default_kb, default_lexicon, load_task

ACCEPTANCE_LINES: list[str] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: runs full trial batches (seconds)")


def pytest_collection_modifyitems(config, items):
    if os.environ.get("COWP_LIVE_ENDPOINT"):
        return
    skip = pytest.mark.skip(reason="set COWP_LIVE_ENDPOINT (and the credential variable) to run")
    for item in items:
        marker = item.get_closest_marker("network")
        # self_gated tests call pytest.skip themselves so they can report it
        if marker is not None and not marker.kwargs.get("self_gated"):
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def serve_water():
    return load_task("Serve water")


@pytest.fixture
def mock_oracle():
    return Oracle(MockBackend(default_kb()))


@pytest.fixture(scope="session")
def lexicon():
    return default_lexicon()


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


def entries(catalog, *names):
    by_name = {e.type_name: e for e in catalog}
    return [by_name[n] for n in names]
