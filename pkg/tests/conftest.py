import pytest

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    for key, value in report.user_properties:
        if key == "acceptance":
            entry = _ACCEPTANCE.setdefault(value, [])
            entry.append(report.passed)


@pytest.fixture
def acceptance(request):
    marker = request.node.get_closest_marker("acceptance")
    number, title = marker.args
    request.node.user_properties.append(("acceptance", (number, title)))
    return number


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), results in sorted(_ACCEPTANCE.items()):
        status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"[{status}] AC{number}: {title} ({sum(results)}/{len(results)} checks)")
