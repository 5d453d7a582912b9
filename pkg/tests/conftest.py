import math

import numpy as np
import pytest
from hypothesis import settings

from platenet.parameters import SystemParameters

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def params():
    return SystemParameters(alpha=1 / math.pi**2, beta=1.0, gamma=1.0, delta=1.0, theta=0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
