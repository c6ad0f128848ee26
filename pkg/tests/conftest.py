import numpy as np
import pytest
from hypothesis import settings

from qbatt.model import SystemParams

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

G = 0.01


@pytest.fixture
def optimal_params():
    """Single cell at gammaC = 2g, delta = 1, gammaB = 0.1g, zero temperature."""
    return SystemParams(g=G, gammaC=2 * G, gammaB=0.1 * G, delta=1.0)


def random_density(dim, rng):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def random_hermitian(dim, rng):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (a + a.conj().T)


_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    failed = report.failed
    if report.when == "call" or failed:
        prev = _criteria.get(number, (title, True, 0.0))
        duration = prev[2] + (report.duration if report.when == "call" else 0.0)
        _criteria[number] = (title, prev[1] and not failed, duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok, duration = _criteria[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  ({duration:6.1f} s)  {title}")
