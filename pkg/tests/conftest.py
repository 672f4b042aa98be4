import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from entropic_talagrand import (PotentialSpec, build_generator, gaussian_grid,
                                transition_kernel)


@pytest.fixture(scope="session")
def quad_pot():
    return PotentialSpec.quadratic(1.0)


@pytest.fixture(scope="session")
def grid64(quad_pot):
    return gaussian_grid(1.0, 64)


@pytest.fixture(scope="session")
def gen64(grid64, quad_pot):
    return build_generator(grid64, quad_pot, 1.0)


@pytest.fixture(scope="session")
def m64(gen64):
    return gen64.stationary


@pytest.fixture(scope="session")
def k64(gen64):
    return transition_kernel(gen64, 1.0)


@pytest.fixture(scope="session")
def grid128(quad_pot):
    return gaussian_grid(1.0, 128)


@pytest.fixture(scope="session")
def gen128(grid128, quad_pot):
    return build_generator(grid128, quad_pot, 1.0)


@pytest.fixture(scope="session")
def m128(gen128):
    return gen128.stationary


@pytest.fixture(scope="session")
def k128(gen128):
    return transition_kernel(gen128, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20260811)
