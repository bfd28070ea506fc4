import numpy as np
import pytest

from qdpli.bath import PhononBath, phase_function
from qdpli.reservoir import (CoupledCavityWaveguide, LorentzianCavity,
                             build_reservoir_grid)

OMEGA_X = 1440.0
WINDOW = (OMEGA_X - 6.0, OMEGA_X + 6.0)


@pytest.fixture(scope="session")
def bath40():
    return PhononBath(0.06, 1.0, 40.0)


@pytest.fixture(scope="session")
def table40(bath40):
    return phase_function(bath40)


@pytest.fixture(scope="session")
def table0():
    return phase_function(PhononBath(0.06, 1.0, 0.0))


@pytest.fixture(scope="session")
def cavity():
    return LorentzianCavity(g_mev=0.05, kappa_mev=0.6, omega_c_mev=OMEGA_X + 1.0)


@pytest.fixture(scope="session")
def cavity_grid(cavity):
    return build_reservoir_grid(cavity, WINDOW)


@pytest.fixture(scope="session")
def waveguide():
    return CoupledCavityWaveguide.from_peak_purcell(
        OMEGA_X - 1.0, OMEGA_X + 1.0, 0.02, 0.02,
        peak_purcell=30.0, gamma_b_uev=1.0)


@pytest.fixture(scope="session")
def waveguide_grid(waveguide):
    return build_reservoir_grid(waveguide, WINDOW)


@pytest.fixture()
def rng():
    return np.random.default_rng(987654321)
