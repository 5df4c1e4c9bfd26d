import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    name = mark.args[0]
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        ok = rep.passed and _CRITERIA.get(name, (True, ""))[0]
        detail = "" if rep.passed else str(rep.longrepr.reprcrash.message
                                           if hasattr(rep.longrepr, "reprcrash") else rep.longrepr)
        prev = _CRITERIA.get(name, (True, ""))[1]
        _CRITERIA[name] = (ok, prev or detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda s: int(s[1:])):
        ok, detail = _CRITERIA[name]
        line = f"{name} {'PASS' if ok else 'FAIL'}"
        if not ok and detail:
            line += f"  ({detail.splitlines()[0][:110]})"
        terminalreporter.write_line(line)
