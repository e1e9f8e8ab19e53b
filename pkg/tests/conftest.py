import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    entry = _RESULTS.setdefault(number, {"title": title, "passed": True, "seen": False, "detail": ""})
    if rep.when == "call":
        entry["seen"] = True
        entry["duration"] = rep.duration
    if rep.failed:
        entry["passed"] = False
    for name, value in item.user_properties:
        if name == "detail":
            entry["detail"] = value


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_RESULTS):
        e = _RESULTS[number]
        status = "PASS" if e["passed"] and e["seen"] else "FAIL"
        line = f"criterion {number:2d}  {status}  {e['title']}  ({e.get('duration', 0.0):.2f} s)"
        if e["detail"]:
            line += f"  [{e['detail']}]"
        tr.write_line(line)
