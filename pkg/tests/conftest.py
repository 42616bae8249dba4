from collections import defaultdict

import pytest

_results = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = dict(item.user_properties).get("detail", "")
        _results[mark.args[0]].append((item.name, report.outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_results):
        runs = _results[n]
        failed = [r for r in runs if r[1] != "passed"]
        status = "PASS" if not failed else "FAIL"
        tr.write_line(f"criterion {n}: {status} ({len(runs) - len(failed)}/{len(runs)} checks passed)")
        for name, outcome, detail in runs:
            if outcome != "passed" or detail:
                tr.write_line(f"    {outcome.upper():6} {name}: {detail}")
