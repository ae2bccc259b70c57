import pytest
from hypothesis import HealthCheck, settings

from branching.constraints import CSPInstance, Linear, Variable
from branching.domains import IntDomain

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

_acceptance = {}


def at_most_one_instance():
    xs = [Variable(f"x{i}", IntDomain(0, 1)) for i in (1, 2, 3)]
    return CSPInstance(xs, [Linear(((0, 1), (1, 1), (2, 1)), "<=", 1)])


@pytest.fixture
def at_most_one():
    return at_most_one_instance()


def pytest_runtest_logreport(report):
    num = getattr(report, "acceptance_number", None)
    if num is None or not (report.when == "call" or report.failed):
        return
    _acceptance[num] = (report.passed, report.nodeid.split("::")[-1])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        report.acceptance_number = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_acceptance):
        passed, name = _acceptance[num]
        terminalreporter.write_line(f"criterion {num:>2}: {'PASS' if passed else 'FAIL'}  ({name})")
