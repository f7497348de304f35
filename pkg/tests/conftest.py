import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from csswaves.functional import make_problem
from csswaves.grid import Grid
from csswaves.model import make_model
from csswaves.operator import PotentialSpec

settings.register_profile(
    "default", deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

CONSTANT = PotentialSpec("constant", omega=1.0)
WELL = PotentialSpec("gaussian_well", omega=1.0, c=8.0, sigma=1.0)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config._criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    table = item.config._criteria
    prev = table.get(number, (title, True))
    # a criterion with several tests passes only if every phase of every test passed
    table[number] = (title, prev[1] and report.passed)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    table = getattr(config, "_criteria", {})
    if not table:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(table):
        title, ok = table[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def grid64():
    return Grid(12.0, 64)


@pytest.fixture(scope="session")
def grid128():
    return Grid(12.0, 128)


@pytest.fixture(scope="session")
def constant64(grid64):
    return make_problem(grid64, CONSTANT, make_model("pure_power", 8.0))


@pytest.fixture(scope="session")
def well64(grid64):
    return make_problem(grid64, WELL, make_model("pure_power", 8.0))


@pytest.fixture(scope="session")
def constant128(grid128):
    return make_problem(grid128, CONSTANT, make_model("pure_power", 8.0))


@pytest.fixture(scope="session")
def well128(grid128):
    return make_problem(grid128, WELL, make_model("pure_power", 8.0))
