import numpy as np
import pytest

from isacrelay import OptimizerConfig


@pytest.fixture(scope="session")
def fast_cfg() -> OptimizerConfig:
    """Reduced search budget for tests that only need a feasible witness or a
    coarse bound, not a tight optimum."""
    return OptimizerConfig(grid_points_per_dim=5, refine_iterations=40,
                           seeds=3, random_samples=300, max_grid_evals=3000)


@pytest.fixture(scope="session")
def full_cfg() -> OptimizerConfig:
    return OptimizerConfig()


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20260825)
