import pytest

# (test name, passed, detail) rows filled by tests/test_acceptance.py
ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the test body sets ``rec["detail"]``."""
    rec = {"detail": ""}
    yield rec
    rep = getattr(request.node, "rep_call", None)
    passed = rep is not None and rep.passed
    ACCEPTANCE.append((request.node.name, passed, rec["detail"]))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
