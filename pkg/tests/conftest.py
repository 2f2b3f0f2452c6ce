import pytest
from hypothesis import HealthCheck, settings

from ruijsenaars.model import ModelParams

settings.register_profile("suite", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("suite")


@pytest.fixture
def params():
    return ModelParams(g=2.0, beta=0.3, r=1.0, a=1.5, m0=1.0)


# one PASS/FAIL line per acceptance criterion, printed in the terminal summary
_CRITERIA = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    number, title = mark.args
    line = f"{'PASS' if rep.passed else 'FAIL'} criterion {number}: {title}"
    _CRITERIA.append((number, line))


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_CRITERIA):
            terminalreporter.write_line(line)
