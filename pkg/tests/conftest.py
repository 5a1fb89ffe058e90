import numpy as np
import pytest

from workdeficit import states
from workdeficit.qstate import BipartiteState

# Reference values computed with a standalone math.log2 script.
H_03 = 0.8812908992306927  # H(0.3, 0.7)
H_08 = 0.7219280948873623  # H(0.8, 0.2)
ONE_MINUS_H_08 = 0.2780719051126377
# Grid-plus-refinement search written independently of the package.
SEPARABLE_DELTA = 0.5


def ket(*bits):
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int("".join(map(str, bits)), 2)] = 1
    return v


def proj(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


@pytest.fixture
def singlet():
    return states.max_entangled(2).density()


@pytest.fixture
def cc():
    return states.cc_pair()


@pytest.fixture
def separable():
    plus = np.array([1, 1]) / np.sqrt(2)
    rho = 0.5 * (np.kron(proj([1, 0]), proj([1, 0])) + np.kron(proj(plus), proj([0, 1])))
    return BipartiteState(rho, 2, 2)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
