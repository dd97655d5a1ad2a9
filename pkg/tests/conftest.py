import pytest

_results = pytest.StashKey[dict]()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion reported in the summary")
    config.stash[_results] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (rep.when != "call" and not rep.failed):
        return
    number, title = marker.args
    detail = dict(item.user_properties).get("detail", "")
    if rep.failed and not detail:
        detail = str(call.excinfo.value).splitlines()[0] if call.excinfo else "error"
    results = item.config.stash[_results]
    ok = results.get(number, (True,))[0] and rep.passed
    results[number] = (ok, title, detail)


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash[_results]
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, title, detail = results[number]
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}"
        terminalreporter.write_line(f"{line} [{detail}]" if detail else line)
