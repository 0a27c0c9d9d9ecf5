import pytest

from rotorsmc import FirstOrderModel, UavPlant
from rotorsmc.config import ExperimentConfig


@pytest.fixture
def gx():
    return FirstOrderModel(1.16, 0.75)


@pytest.fixture
def gz():
    return FirstOrderModel(0.98, 0.30)


@pytest.fixture
def cfg():
    return ExperimentConfig.load()


@pytest.fixture
def nominal_plant(gx, gz):
    return UavPlant(gx, gx, gz)
