import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def trefoil():
    from su2torsion.presentation import builtin
    return builtin("trefoil")


@pytest.fixture(scope="session")
def path():
    from su2torsion.repvariety import TrefoilPath
    return TrefoilPath()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
