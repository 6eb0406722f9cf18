import numpy as np
import pytest

from hypertoda.rootsystem import build_root_system

# Default spectral parameters: pairings (lambda, alpha_i^vee) over B.
DEFAULT_PAIRINGS = (0.9 + 0.31j, 1.3 - 0.27j, 0.7 + 0.45j, 1.1 - 0.15j)


def default_lambda(rank: int) -> np.ndarray:
    return np.array(DEFAULT_PAIRINGS[:rank], dtype=complex)


@pytest.fixture(params=["A1", "A2", "B2", "G2"])
def small_rs(request):
    return build_root_system(request.param)


@pytest.fixture
def a2():
    return build_root_system("A2")


@pytest.fixture
def a1():
    return build_root_system("A1")


@pytest.fixture
def b2():
    return build_root_system("B2")
