import re

_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+)")
_results: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    match = _CRITERION.search(report.nodeid)
    if not match:
        return
    number, label = int(match.group(1)), match.group(2).replace("_", " ")
    failed = report.failed or (report.when == "call" and report.skipped)
    previous = _results.get(number, (label, "PASS"))[1]
    if report.when == "call" or failed:
        status = "FAIL" if failed or previous == "FAIL" else "PASS"
        _results[number] = (label, status)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        label, status = _results[number]
        terminalreporter.write_line(f"criterion {number} ({label}): {status}")
