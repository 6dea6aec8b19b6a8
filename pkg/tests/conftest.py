import pytest

_criteria = {}


def pytest_runtest_logreport(report):
    marker = _criteria.get(report.nodeid)
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        marker["outcome"] = report.outcome


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            number, title = mark.args
            _criteria[item.nodeid] = {"number": number, "title": title, "outcome": "not run"}


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for info in sorted(_criteria.values(), key=lambda d: d["number"]):
        status = {"passed": "PASS", "failed": "FAIL"}.get(info["outcome"], info["outcome"].upper())
        terminalreporter.write_line(f"criterion {info['number']:>2}: {status}  {info['title']}")
