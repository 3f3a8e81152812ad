from pathlib import Path

import pytest

from gte_lm.utils.io import load_problem, read_tensor

FIXTURES = Path(__file__).parent / "fixtures"


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run the long desk-scale reproductions")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long desk-scale reproductions (enable with --runslow)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def strong_p_indefinite():
    """A x^3 = (x1^3 + x1 x2^2 - 3 x2^3, x2^3): strong P but not strictly PD."""
    return read_tensor(FIXTURES / "strong_p_indefinite.tensor")


@pytest.fixture
def zplus_not_p():
    return read_tensor(FIXTURES / "zplus_not_p.tensor")


@pytest.fixture
def pd_multiple_roots():
    return read_tensor(FIXTURES / "pd_multiple_roots.tensor")


@pytest.fixture
def singular_cube():
    return read_tensor(FIXTURES / "singular_cube.tensor")


@pytest.fixture
def singular_cube_instance():
    return load_problem(FIXTURES / "singular_cube.yaml")
