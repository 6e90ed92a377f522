import numpy as np
import pytest

from muntz_lab import MuntzSequence, validate_sequence


@pytest.fixture
def geometric5():
    """(1, 2, 4, 8, 16)"""
    return MuntzSequence.geometric(2, 5)


@pytest.fixture
def linear():
    return validate_sequence([0, 1])


@pytest.fixture
def quad():
    return validate_sequence([0, 1, 2])


@pytest.fixture
def sparse3():
    """span{t, t^2, t^4}"""
    return validate_sequence([1, 2, 4])


def brute_sup(p, lo=0.0, hi=1.0, n=1_000_000):
    ts = np.linspace(lo, hi, n)
    return float(np.abs(p(ts)).max())


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
