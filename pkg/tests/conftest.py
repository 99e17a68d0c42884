"""Collects ``@pytest.mark.criterion`` outcomes and prints one line each."""

import pytest

_outcomes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, name): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    if rep.when == "setup" and rep.passed:
        return
    # a criterion spread over several tests passes only if all of them do
    _outcomes[mark.args] = _outcomes.get(mark.args, True) and rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for (number, name), ok in sorted(_outcomes.items()):
        terminalreporter.write_line(f"criterion {number} {name}: {'PASS' if ok else 'FAIL'}")
