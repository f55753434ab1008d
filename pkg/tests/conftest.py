import re

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    num = int(m.group(1))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA[num] = (report.outcome, _CRITERIA.get(num, ("", ""))[1])


def pytest_collection_modifyitems(items):
    for item in items:
        m = re.search(r"test_criterion_(\d+)", item.name)
        if m and item.obj.__doc__:
            title = item.obj.__doc__.strip().splitlines()[0]
            _CRITERIA.setdefault(int(m.group(1)), ("not run", title))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        outcome, title = _CRITERIA[num]
        verdict = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"criterion {num}: {verdict}  {title}")
