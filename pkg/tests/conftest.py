import pytest

from stratawave import AtmosphereParams, GasParams

# figure-experiment parameter set: gamma=1.01, theta=omega=0.1, alpha=0.35, beta=0.06


@pytest.fixture(scope="session")
def baseline_gas() -> GasParams:
    return GasParams(alpha=0.35, beta=0.06, gamma=1.01)


@pytest.fixture(scope="session")
def baseline_atm() -> AtmosphereParams:
    return AtmosphereParams(theta=0.1, omega=0.1)
