import numpy as np
import pytest

from mimo_secrecy.augmented import make_generator
from mimo_secrecy.config import REFERENCE_CHANNEL_JSON
from mimo_secrecy.data_io import load_channel
from mimo_secrecy.models import ChannelPair


@pytest.fixture
def rng() -> np.random.Generator:
    return make_generator(20240611)


@pytest.fixture
def reference_channel() -> ChannelPair:
    return load_channel(REFERENCE_CHANNEL_JSON)


@pytest.fixture
def scalar_channel() -> ChannelPair:
    """h_r = 2, h_e = 1: degraded, capacity ln((1 + 4P) / (1 + P))."""
    return ChannelPair(np.array([[2.0]]), np.array([[1.0]]))
