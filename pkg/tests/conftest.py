import sys

import pytest

from swellfront.engine import RunConfig, run


@pytest.fixture(scope="session")
def dense_run():
    """Dense-rubber calibration run at the default settings (N=100, T=40 min)."""
    return run(RunConfig().with_material("dense"))


@pytest.fixture(scope="session")
def foam_run():
    return run(RunConfig().with_material("foam"))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
