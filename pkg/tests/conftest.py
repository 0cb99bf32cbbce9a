import pytest

from cfedge.model import ComputeConfig, NetworkConfig

# Exact-fraction service rates implied by the default hardware constants:
# 8 f / (330 * 0.5e6) with f in {4, 5} GHz centrally and {1, 3.4} GHz at
# the edge.
MU_C = (6400.0 / 33.0, 8000.0 / 33.0)
MU_M = (1600.0 / 33.0, 5440.0 / 33.0)


def make_net(**overrides) -> NetworkConfig:
    base = dict(lambda_b=400.0, lambda_d=100.0, antennas_per_ap=4,
                alpha=3.7, d0=0.001, coverage_radius=0.05)
    base.update(overrides)
    return NetworkConfig(**base)


@pytest.fixture
def fig_net() -> NetworkConfig:
    return make_net()


@pytest.fixture
def mix_comp() -> ComputeConfig:
    return ComputeConfig(type_probs=(0.6, 0.4), mu_c=MU_C, mu_m=MU_M,
                         offload_prob=0.5, target_latency=0.012)


@pytest.fixture
def single_comp() -> ComputeConfig:
    return ComputeConfig(type_probs=(1.0,), mu_c=(MU_C[1],), mu_m=(MU_M[1],),
                         offload_prob=0.2, target_latency=0.012)
