"""Per-criterion pass/fail summary for the acceptance suite."""

import pytest

CRITERIA = {
    1: "toy golden run",
    2: "sum-check completeness",
    3: "statistical soundness",
    4: "multi-point decay",
    5: "block-Vandermonde roundtrip",
    6: "Schwartz-Zippel frequencies",
    7: "extractor branch equivalence",
    8: "fallback call bound",
    9: "brute-force oracle equivalence",
    10: "determinism",
    11: "backend envelope",
    12: "proof-size scaling",
    13: "format fidelity",
}

_outcomes: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_collection_modifyitems(items):
    for item in items:
        if item.get_closest_marker("criterion") is not None:
            item.add_marker(pytest.mark.acceptance)


def pytest_runtest_logreport(report):
    num = getattr(report, "criterion", None)
    if num is None:
        return
    if report.when == "call" or report.failed:
        _outcomes.setdefault(num, []).append(report.passed and report.when == "call")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for num, title in CRITERIA.items():
        runs = _outcomes.get(num)
        if runs is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(runs) else "FAIL"
        terminalreporter.write_line(f"criterion {num:2d} {status:7s} {title}")
