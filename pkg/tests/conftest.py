import numpy as np
import pytest

from burgers_pod.fdsolver import simulate
from burgers_pod.harness import PRESETS


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def case1_sim():
    return simulate(PRESETS[1].config)


@pytest.fixture(scope="session")
def case5_sim():
    return simulate(PRESETS[5].config)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    return request.config.stash.setdefault(_ACCEPTANCE_KEY, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines):
        terminalreporter.write_line(line)
