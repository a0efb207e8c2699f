import math

import pytest
from scipy.integrate import quad

from modawgn import SymbolMap, WrappedGaussian


def phi(x, s=1.0):
    return math.exp(-0.5 * (x / s) ** 2) / (s * math.sqrt(2 * math.pi))


def direct_sum(x, delta, sigma, k=20):
    """Reference wrapped density: plain image sum, no truncation policy."""
    return math.fsum(phi(x + j * delta, sigma) for j in range(-k, k + 1))


def q_ref(x):
    return 0.5 * math.erfc(x / math.sqrt(2))


def band_ref(a, b, delta, sigma, k=20):
    return math.fsum(q_ref((a + j * delta) / sigma) - q_ref((b + j * delta) / sigma) for j in range(-k, k + 1))


def integrate_density(a, b, delta, sigma):
    return quad(lambda t: direct_sum(t, delta, sigma), a, b, epsabs=1e-14, epsrel=1e-13, limit=200)[0]


@pytest.fixture
def g5():
    return WrappedGaussian(5.0, 1.0)


@pytest.fixture
def opt5():
    return SymbolMap.optimal(5.0)


# one verdict line per acceptance criterion, filled in by test_acceptance
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
