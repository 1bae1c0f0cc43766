import numpy as np
import pytest

from qosclab.graded_linalg import ParityProfile

SMALL_PROFILES = [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)]


def random_q(rng, lo=0.3, hi=0.7):
    return complex(rng.uniform(lo, hi) * np.exp(2j * np.pi * rng.random()))


def random_point(rng):
    return complex(rng.uniform(0.5, 2.0) * np.exp(2j * np.pi * rng.random()))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=SMALL_PROFILES, ids=lambda p: f"{p[0]}-{p[1]}")
def small_profile(request):
    return ParityProfile(*request.param)
