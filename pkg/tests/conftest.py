import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from locwave.core import PhysicalContext

settings.register_profile("locwave", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("locwave")


@pytest.fixture
def ctx():
    return PhysicalContext()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def rel_err(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


# acceptance bookkeeping: one line per criterion in the terminal summary
ACCEPTANCE_LINES = {}


def pytest_runtest_logreport(report):
    key = report.nodeid.split("::")[-1]
    if "test_acceptance.py" in report.nodeid and key.startswith("test_criterion_") and report.when == "call":
        n = int(key.split("_")[2])
        detail = ACCEPTANCE_LINES.get(n, "")
        ACCEPTANCE_LINES[n] = ("PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    rows = {n: v for n, v in ACCEPTANCE_LINES.items() if isinstance(v, tuple)}
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(rows):
        status, detail = rows[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {detail}")
