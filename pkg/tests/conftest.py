import random

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture
def fixed_rng():
    return random.Random(0xC0FFEE)


@pytest.fixture
def small_keyset(fixed_rng):
    from ire.keymat import generate_keyset

    return generate_keyset(fixed_rng, rbs_bits=512)
