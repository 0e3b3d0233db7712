import pytest

_ACCEPTANCE_RESULTS: list[tuple[str, str]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and "test_acceptance" in str(item.fspath):
        _ACCEPTANCE_RESULTS.append((item.name, report.outcome))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, outcome in _ACCEPTANCE_RESULTS:
        label = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{label}] {name}")
