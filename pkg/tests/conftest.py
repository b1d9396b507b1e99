"""Prints one PASS/FAIL line per acceptance criterion after the run."""

_RESULTS = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or report.failed:
        prev = _RESULTS.get(report.nodeid, True)
        _RESULTS[report.nodeid] = prev and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_RESULTS, key=lambda s: int(s.split("test_criterion_")[1].split("_")[0])):
        name = nodeid.split("::")[-1].removeprefix("test_criterion_")
        terminalreporter.write_line(f"{'PASS' if _RESULTS[nodeid] else 'FAIL'}  criterion {name}")
