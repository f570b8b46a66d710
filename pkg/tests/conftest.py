import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from panc.geometry import ChannelRealization

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def make_channel(rng, sigma2=1.0):
    """Unit-Rayleigh draw with a well-conditioned relay constellation."""
    def cn():
        return complex(*rng.standard_normal(2)) / math.sqrt(2.0)
    while True:
        ch = ChannelRealization(cn(), cn(), abs(cn()), abs(cn()), abs(cn()), sigma2=sigma2)
        if abs(ch.beta) > 1e-3:
            return ch


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def channel():
    return ChannelRealization(0.9 + 0.3j, -0.2 + 1.1j, 0.8, 0.5, 1.2, sigma2=0.1)
