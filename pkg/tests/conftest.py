import pytest

_RESULTS = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    detail = dict(item.user_properties).get("detail", "")
    _RESULTS[number] = (title, report.passed, report.duration, detail)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, passed, duration, detail = _RESULTS[number]
        verdict = "PASS" if passed else "FAIL"
        line = f"[{verdict}] criterion {number}: {title} ({duration:.1f} s)"
        terminalreporter.write_line(line + (f"  {detail}" if detail else ""))
