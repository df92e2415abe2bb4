import numpy as np
import pytest

from qbcharge import ProtocolSpec, PulseSpec


@pytest.fixture(scope="session")
def gauss72():
    return PulseSpec("gaussian", tau_c=7.2)


@pytest.fixture(scope="session")
def gauss50():
    return PulseSpec("gaussian", tau_c=50.0)


@pytest.fixture(scope="session")
def sta72(gauss72):
    return ProtocolSpec("sta", gauss72)


@pytest.fixture(scope="session")
def stirap72(gauss72):
    return ProtocolSpec("stirap", gauss72)


@pytest.fixture(scope="session")
def stirap50(gauss50):
    return ProtocolSpec("stirap", gauss50)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
