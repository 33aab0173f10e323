import pytest

from sqfap import _fallback
from sqfap.arith import sieve_mobius

try:
    from sqfap import _core
except ImportError:  # extension not built
    _core = None

BACKENDS = [pytest.param(_fallback, id="python")]
if _core is not None:
    BACKENDS.append(pytest.param(_core, id="cython"))

ACCEPTANCE_LINES = []


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture(scope="session")
def table_small():
    return sieve_mobius(10**4)


@pytest.fixture(scope="session")
def table_1e5():
    return sieve_mobius(10**5)


@pytest.fixture(scope="session")
def table_1e6():
    return sieve_mobius(10**6)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
