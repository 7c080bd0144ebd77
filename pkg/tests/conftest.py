import pytest

from tcamsim import calibrate, default_relay_params


@pytest.fixture(scope="session")
def cal():
    """Default calibration, shared across suites (pure closed-form solve)."""
    return calibrate()


@pytest.fixture
def relay():
    return default_relay_params()
