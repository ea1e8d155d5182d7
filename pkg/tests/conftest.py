import numpy as np
import pytest

from softfec.ebch import make_code


@pytest.fixture(scope="session")
def hamming8():
    return make_code(3, 1)


@pytest.fixture(scope="session")
def ebch64():
    return make_code(6, 1)


@pytest.fixture(scope="session")
def ebch256():
    return make_code(8, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
