import numpy as np
import pytest

from aoitraj import TransitCostMatrix

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    _criteria[number] = (title, "PASS" if call.excinfo is None else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, outcome = _criteria[number]
        terminalreporter.write_line(f"[{outcome}] {number}. {title}")


@pytest.fixture
def two_node_eta():
    """The hand-checkable instance: eta12=4, eta21=6, eta10=3, eta20=5."""
    return TransitCostMatrix([[0, 1, 1], [3, 0, 4], [5, 6, 0]])

