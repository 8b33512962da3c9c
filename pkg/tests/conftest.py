import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

INSTANCES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "instances")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def instance_path():
    return lambda name: os.path.join(INSTANCES, name)
