import numpy as np
import pytest

from hybridoptomech.model import LinearParams
from hybridoptomech.spectra import optimal_cavity_detuning


def sideband_params(kappa=20.0, gamma=0.8, g=0.25, lam=8.0, mu=0.01, delta_a=-0.6, **kw):
    """Linear parameters with the cavity on the polariton sideband condition."""
    dc = optimal_cavity_detuning(delta_a, lam)
    return LinearParams(kappa=kappa, gamma=gamma, g=g, lam=lam, mu=mu, delta_a=delta_a, delta_c=dc, **kw)


@pytest.fixture
def fig3_lin():
    return sideband_params(gamma_m=1e-6, nbar=1e3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
