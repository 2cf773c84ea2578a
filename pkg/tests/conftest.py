import numpy as np
import pytest

from gifs_lab.addresses import ArityProfile
from gifs_lab.balanced import build_balanced_set, materialize_net
from gifs_lab.witness import build_refined_system, build_witness_system


@pytest.fixture(scope="session")
def profile():
    return ArityProfile((2, 2, 8))


@pytest.fixture(scope="session")
def tree(profile):
    return build_balanced_set(2.0, profile)


@pytest.fixture(scope="session")
def tree_q3(profile):
    return build_balanced_set(3.0, profile)


@pytest.fixture(scope="session")
def net3(tree):
    return materialize_net(tree, 3)


@pytest.fixture(scope="session")
def witness(tree):
    return build_witness_system(tree)


@pytest.fixture(scope="session")
def refined(tree):
    return build_refined_system(tree, 0.3)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance as acc
    if acc.RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(acc.RESULTS):
            terminalreporter.write_line(acc.RESULTS[k])
