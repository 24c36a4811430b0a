import pytest

from holosphere.dataset import make


@pytest.fixture
def pants():
    return make([(0, "-", (0, 1)), (0, "-", (1, 1)), (0, "+", (1, 2))])


@pytest.fixture
def cylinder():
    return make([(0, "+", (1, 1)), (0, "-", (1, 1))])


@pytest.fixture
def disk():
    return make([(0, "-", (0, 1))], c_plus=1)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS, _line

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(_line(n, *RESULTS[n]))
