import numpy as np
import pytest

from bwetools.demo import synthetic_speech


@pytest.fixture(scope="session")
def speech_clip():
    return synthetic_speech(duration=3.0, rate=48000, seed=0)


def logistic_orbit(n, x0=0.37):
    """Fully chaotic logistic map orbit, x_{t+1} = 4 x_t (1 - x_t)."""
    x = np.empty(n)
    x[0] = x0
    for i in range(1, n):
        x[i] = 4.0 * x[i - 1] * (1.0 - x[i - 1])
    return x
