import pytest

_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, text = marker.args
    if rep.when == "call" or rep.failed:
        prev = _criteria.get(number, (text, "passed"))[1]
        status = "failed" if (rep.failed or prev == "failed") else rep.outcome
        _criteria[number] = (text, status)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_criteria):
        text, status = _criteria[number]
        tag = "PASS" if status == "passed" else status.upper()
        terminalreporter.write_line(f"[{tag}] {number:2d}. {text}")
