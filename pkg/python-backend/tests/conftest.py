import pytest

from gossip_age.schemas.params import CostModel, GameParams
from gossip_age.schemas.simulation import SimConfig, SimMode


@pytest.fixture
def line_params() -> GameParams:
    """Two-way line setting: L=10, p=0.2, beta=0.6, p_e=0.3 (x_S = 0.8)."""
    return GameParams(p_e=0.3, p=0.2, beta=0.6, L=10.0)


@pytest.fixture
def fc_params() -> GameParams:
    """Fully-connected setting with n=10: L=1.6 (threshold 1.28)."""
    return GameParams(p_e=0.3, p=0.2, beta=0.6, L=1.6)


@pytest.fixture
def quadratic_cost() -> CostModel:
    return CostModel(a=80.0, q=2.0)


@pytest.fixture
def quick_sim() -> SimConfig:
    """Reduced-scale time-average runs for CI."""
    return SimConfig(slots=4000, iterations=32, seed=7, mode=SimMode.TIME_AVERAGE, block_size=8)
