import numpy as np
import pytest

from nfirs.config import ScenarioConfig


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_config():
    return ScenarioConfig(M_l=4, M_r=4, N_l=3, N_r=3, irs_l_dims=(2, 3), irs_r_dims=(2, 3),
                          p_l=10.0, p_r=10.0)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def criterion(request):
    """Record one verdict line: ``criterion(n, name, passed, detail)``."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def record(number, name, passed, detail):
        lines.append((number, f"criterion {number} [{name}]: "
                              f"{'PASS' if passed else 'FAIL'} ({detail})"))
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
