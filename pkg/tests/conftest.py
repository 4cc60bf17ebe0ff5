import pytest

_results: dict[str, list[str]] = {}
_labels: dict[str, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(cid, label): acceptance criterion id and short label")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    cid, label = mark.args
    _labels[cid] = label
    status = "PASS" if rep.passed else "SKIP" if rep.skipped else "FAIL"
    _results.setdefault(cid, []).append(status)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")

    def key(cid):
        num = "".join(ch for ch in cid if ch.isdigit())
        return int(num), cid

    for cid in sorted(_results, key=key):
        statuses = _results[cid]
        verdict = "FAIL" if "FAIL" in statuses else "SKIP" if "SKIP" in statuses else "PASS"
        terminalreporter.write_line(f"criterion {cid:>3}: {verdict}  {_labels[cid]}")
