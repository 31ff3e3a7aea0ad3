import numpy as np
import pytest

from capsched import Config, Workload


@pytest.fixture
def ref_config():
    # the small worked instance used across the suite
    return Config(n=8, delta=2, theta=3)


@pytest.fixture
def ref_workload():
    return Workload(arrivals=np.array([2, 0, 1, 0, 0, 0, 0, 0]),
                    departures=np.array([0, 0, 0, 0, 2, 0, 0, 0]))
