import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance as acc

    if acc.RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(acc.RESULTS):
            terminalreporter.write_line(acc.RESULTS[k])
