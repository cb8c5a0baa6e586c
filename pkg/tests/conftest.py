import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(tag, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    tag, text = mark.args
    if rep.when == "setup" and rep.passed:
        return
    if hasattr(rep, "wasxfail"):
        status = "FAIL (known, see xfail reason)"
    elif rep.passed:
        status = "PASS"
    elif rep.skipped:
        status = "SKIP"
    else:
        status = "FAIL"
    _RESULTS[tag] = (text, status)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    key = lambda t: int("".join(ch for ch in t if ch.isdigit()) or 0)
    for tag in sorted(_RESULTS, key=key):
        text, status = _RESULTS[tag]
        tr.write_line(f"{tag:<5} {status:<32} {text}")
