import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from jjdirac import diracmap, fluxqubit, rwa  # noqa: E402
from jjdirac.core import default_config  # noqa: E402


@pytest.fixture(scope="session")
def cfg1():
    return default_config(1)


@pytest.fixture(scope="session")
def cfg3():
    return default_config(3)


@pytest.fixture(scope="session")
def sol1(cfg3):
    return fluxqubit.solve(cfg3.flux_qubit(1))


@pytest.fixture(scope="session")
def sol2(cfg3):
    return fluxqubit.solve(cfg3.flux_qubit(2))


@pytest.fixture(scope="session")
def cc1(cfg1):
    return rwa.circuit_couplings(cfg1)


@pytest.fixture(scope="session")
def cc3(cfg3):
    return rwa.circuit_couplings(cfg3)


@pytest.fixture(scope="session")
def eh1(cc1):
    return rwa.effective_hamiltonian(cc1)


@pytest.fixture(scope="session")
def eh3(cc3):
    return rwa.effective_hamiltonian(cc3)


@pytest.fixture(scope="session")
def dirac1(eh1):
    return diracmap.map_parameters(eh1)


@pytest.fixture(scope="session")
def dirac3(eh3):
    return diracmap.map_parameters(eh3)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
