import pytest

from slidingheat.disturbance import DisturbanceSpec
from slidingheat.heat_sim import SimConfig
from slidingheat.spectral import solve_eigenvalue


@pytest.fixture(scope="session")
def pair0():
    return solve_eigenvalue(0.5, 0)


@pytest.fixture(scope="session")
def pair1():
    return solve_eigenvalue(0.5, 1)


@pytest.fixture(scope="session")
def reference_disturbance():
    return DisturbanceSpec.sinusoid(2.0, 1.0)


@pytest.fixture
def reference_config():
    return SimConfig()
