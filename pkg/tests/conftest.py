import pytest

_criteria = {}


@pytest.fixture
def criterion(record_property):
    """Tag a test with an acceptance criterion number and a detail line."""

    def tag(number, detail=""):
        record_property("criterion", number)
        if detail:
            record_property("detail", detail)

    return tag


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props or report.when != "call":
        return
    if report.passed:
        line = props.get("detail", "")
    else:
        line = report.longrepr.reprcrash.message.splitlines()[0] if hasattr(report.longrepr, "reprcrash") else "failed"
    _criteria[props["criterion"]] = ("PASS" if report.passed else "FAIL", report.duration, line)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        status, seconds, line = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {status} ({seconds:.1f} s) {line}")
