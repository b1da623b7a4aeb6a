import numpy as np
import pytest

from database.models import DatabaseManager
from experiments.config import ExperimentConfig
from experiments.pipeline import build_problem, build_scalings


def make_problem(dim, N, m, coeff="constant", method=0):
    return build_problem(ExperimentConfig(dim=dim, N=N, m=m, method=method, coeff=coeff))


@pytest.fixture(scope="session")
def problem_2d():
    """2x2 subdomains, H/h = 4, constant coefficient"""
    return make_problem(2, 2, 4)


@pytest.fixture(scope="session")
def problem_2d_random():
    """3x3 subdomains, H/h = 4, seeded random coefficient over two orders of magnitude"""
    return make_problem(2, 3, 4, coeff="random:7:-1:1")


@pytest.fixture(scope="session")
def problem_3d():
    """2x2x2 subdomains, H/h = 3, seeded random coefficient"""
    return make_problem(3, 2, 3, coeff="random:3:-1:1")


@pytest.fixture(scope="session")
def multiplicity_2d(problem_2d):
    return build_scalings(problem_2d, "multiplicity")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def db_manager():
    return DatabaseManager("sqlite://")


@pytest.fixture(autouse=True)
def no_configured_database(monkeypatch):
    import settings

    monkeypatch.setattr(settings, "DATABASE_URL", None)
