import numpy as np
import pytest

from iwapipe import config
from iwapipe.padic_core import PrimeConfig

@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """defaults only, reports under a temporary directory"""
    monkeypatch.setattr(config, 'get_config_path', lambda: tmp_path / 'missing.conf')
    monkeypatch.setenv(config.OUTPUT_DIR_VARIABLE, str(tmp_path / 'out'))

@pytest.fixture
def cfg_gl2():
    return PrimeConfig(p=5, f=1, M=2, N=1, case='GL2')

@pytest.fixture
def cfg_quat():
    return PrimeConfig(p=5, f=1, M=2, N=1, case='QUAT')

@pytest.fixture
def cfg_small():
    """M = 1: the whole group has 125 elements"""
    return PrimeConfig(p=5, f=1, M=1, case='GL2')

@pytest.fixture
def rng():
    return np.random.default_rng(12345)
