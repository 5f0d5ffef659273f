import numpy as np
import pytest

from driftfolio.model import MarketModel


def scalar_model(*, sigma=0.2, r=0.02, alpha=1.0, beta=0.1, b=0.0,
                 delta=0.05, m0=0.05, gamma0=0.04, T=1.0,
                 grid_step=1e-3) -> MarketModel:
    return MarketModel.build(
        1, T, sigma=sigma, r=r, alpha=alpha, beta=beta, b=b, delta=delta,
        m0=[m0], gamma0=[[gamma0]], S0=[1.0], grid_step=grid_step)


@pytest.fixture(scope="session")
def benchmark_model() -> MarketModel:
    """Desk-scale reference model used across the suite."""
    return scalar_model()


@pytest.fixture(scope="session")
def benchmark_riccati(benchmark_model):
    from driftfolio.filter import solve_riccati
    return solve_riccati(benchmark_model)


def mc_se_tol(stderr, k=3.0, floor=1e-12):
    return max(k * stderr, floor)
