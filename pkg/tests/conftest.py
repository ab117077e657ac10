import numpy as np
import pytest

from cournot_mfg.config import preset
from cournot_mfg.grid import build_grid
from cournot_mfg.model import DiffusionProfile, LinearPrice, ModelParams

from _support import bm_params


@pytest.fixture
def params():
    return bm_params()


@pytest.fixture
def gbm_params():
    return bm_params("geometric")


@pytest.fixture
def linear_params():
    return ModelParams(0.1, 2.0, 5.0, DiffusionProfile("constant", 0.2), LinearPrice(E=1.5, rho=0.02, pi_sub=10.0, T=4.0))


@pytest.fixture
def small_grid():
    return build_grid(6.0, 15.0, 30, 60)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def small_config():
    cfg = preset("test1-bm").with_grid(30, 60)
    return cfg.with_solver(max_iters=1000, exploitability_every=10)


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
