import numpy as np
import pytest

from spectral_shapes.geometry import DiskQuadrature


def pytest_configure(config):
    config._criteria = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = getattr(config, "_criteria", [])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(rows, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def criterion(request):
    """Record one pass/fail line for an acceptance criterion."""

    def record(n, ok, detail=""):
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        request.config._criteria.append((n, bool(ok), detail))
        return ok

    return record


@pytest.fixture(scope="session")
def quad():
    return DiskQuadrature()


@pytest.fixture(scope="session")
def coarse_quad():
    return DiskQuadrature(24, 64)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
