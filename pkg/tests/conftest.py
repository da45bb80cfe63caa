import pytest

_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n, title = marker.args
    failed = report.failed or (report.when == "setup" and report.skipped)
    prev = _results.get(n, (title, True, ""))
    detail = prev[2]
    if report.when == "call":
        detail = next((text for name, text in item.user_properties if name == "detail"), detail)
    _results[n] = (title, prev[1] and not failed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        title, ok, detail = _results[n]
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))
