import numpy as np
import pytest

from walkoff_pdc.crystal_optics import CrystalSpec, phase_matching_angle
from walkoff_pdc.tpa import PumpSpec

PUMP_WL = 405e-9


@pytest.fixture(scope="session")
def theta_pm():
    return phase_matching_angle(PUMP_WL)


@pytest.fixture(scope="session")
def bbo_1mm(theta_pm):
    return CrystalSpec(1e-3, theta_pm)


@pytest.fixture(scope="session")
def pump():
    return PumpSpec(PUMP_WL, 39e-6)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
