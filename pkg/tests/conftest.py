import numpy as np
import pytest

from symplab import ShiftSpace


@pytest.fixture
def space():
    return ShiftSpace(2, 0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def rot(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])
