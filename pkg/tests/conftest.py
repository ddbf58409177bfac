import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from selfsim import _backend  # noqa: E402
from selfsim.similarity_field import build_profile  # noqa: E402


@pytest.fixture(scope="session")
def profile():
    """Profile for the reference data f(0) = -1, f'(0) = 1."""
    return build_profile(-1.0, 1.0)


@pytest.fixture(params=_backend.available())
def backend(request):
    """Run a test once per importable kernel backend."""
    previous = _backend.BACKEND
    _backend.use(request.param)
    yield request.param
    _backend.use(previous)


_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, duration in _acceptance:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] {name} ({duration:.2f}s)")
