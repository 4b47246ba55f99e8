import math

import pytest
from hypothesis import settings

from sksmzi.params import InputParams

settings.register_profile("default", deadline=None, max_examples=200)
settings.load_profile("default")

# values cross-checked against the Fock oracle (see test_oracle.py)
REFERENCE = InputParams(3.0, 1.2, theta=math.pi, gamma=0.3, r=0.8)


@pytest.fixture
def reference() -> InputParams:
    return REFERENCE
