import pytest

from escwind import TurbineParams, optimal_torque_gain


@pytest.fixture(scope="session")
def params() -> TurbineParams:
    return TurbineParams()


@pytest.fixture(scope="session")
def k_star(params) -> float:
    return optimal_torque_gain(params)
