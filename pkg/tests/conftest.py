import numpy as np
import pytest

from negkdv.phase_plane import TravelingWaveParams


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def case3():
    return TravelingWaveParams(-1.0, 1.0)


@pytest.fixture
def case5():
    return TravelingWaveParams(1.0, -1.0)
