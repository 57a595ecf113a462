import numpy as np
import pytest

from qdmsim import PhotophysicsModel, ProtocolParams


@pytest.fixture
def model():
    """Default synthetic photophysics model."""
    return PhotophysicsModel()


@pytest.fixture
def params():
    """Reference timing set used across the formula examples."""
    return ProtocolParams(t_init_ls=20.0, t_init_conf=20.0, t_ro_conf=5.0,
                          t_mw=100.0, t_d=0.1, t1=5000.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
