"""
Shared fixtures for the liedim tests.
"""
import os
import sys

import pytest

# Add parent directory to path to allow importing the src package
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.counterexample import counterexample_presentation  # noqa: E402
from src.hall import generate_hall_basis  # noqa: E402

PRESENTATIONS_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'presentations'))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-scale randomized sweeps")


@pytest.fixture
def presentations_dir():
    return PRESENTATIONS_DIR


@pytest.fixture(scope="session")
def free2_cap4():
    """Free Lie ring on two generators up to degree 4."""
    return generate_hall_basis(2, 4)


@pytest.fixture(scope="session")
def free3_cap4():
    return generate_hall_basis(3, 4)


@pytest.fixture(scope="session")
def counterexample():
    """The built-in presentation with delta_4 != gamma_4, class cap 4."""
    return counterexample_presentation()
