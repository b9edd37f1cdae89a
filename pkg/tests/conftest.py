import math

import numpy as np
import pytest

from ssmeasure import Similitude, build_system


def rotation(deg):
    a = math.radians(deg)
    return np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])


@pytest.fixture(scope="session")
def skewed_gasket():
    """Three maps, unequal ratios, one rotated by a quarter turn."""
    return build_system([Similitude(0.3, np.eye(2), [0, 0]),
                         Similitude(0.3, rotation(90), [1, 0]),
                         Similitude(0.25, np.eye(2), [0.4, 0.6])], name="skewed")


@pytest.fixture(scope="session")
def flipped_line():
    return build_system([Similitude(0.4, np.eye(1), [0.0]),
                         Similitude(0.3, -np.eye(1), [1.0])], name="flipped")


# -- acceptance report ---------------------------------------------------------

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion the test checks")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    for n in getattr(report, "criteria", ()):
        _criteria.setdefault(n, []).append((report.nodeid.split("::")[-1], report.passed))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    outcome.get_result().criteria = [m.args[0] for m in item.iter_markers("criterion")]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        results = _criteria[n]
        ok = all(p for _, p in results)
        failed = [name for name, p in results if not p]
        line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}"
        if failed:
            line += "  (" + ", ".join(failed) + ")"
        terminalreporter.write_line(line)
