import numpy as np
import pytest

from tvacoustics.datagen import DataSpec, DataTriple
from tvacoustics.params import CANON


@pytest.fixture(scope="session")
def canon():
    return CANON


@pytest.fixture(scope="session")
def gaussian_data():
    """Default experiment data: Gaussian phi1, phi0 = T0 = 0."""
    return DataTriple(phi1=DataSpec.gaussian())


@pytest.fixture(scope="session")
def full_data():
    """All three data slots populated (radial)."""
    return DataTriple(
        phi0=DataSpec.gaussian(width=1.2, amplitude=0.7),
        phi1=DataSpec.gaussian(),
        T0=DataSpec.gaussian(width=0.8, amplitude=0.5),
    )


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
