"""Shared fixtures: coarse converged runs reused across test modules."""

import numpy as np
import pytest

from vortexring.profiles import make_generator
from vortexring.solver import ProblemConfig, run


@pytest.fixture(scope="session")
def coarse_turkington():
    """Converged swirl run on a light grid: fast, converges in ~110 steps."""
    config = ProblemConfig(epsilon=0.1, n_r=48, n_z=48, max_iterations=400)
    gen = make_generator("turkington", alpha=1.0)
    result = run(config, gen)
    assert result.converged
    return result


@pytest.fixture(scope="session")
def coarse_power_law():
    """No-swirl run on the same light grid; iteration-capped is acceptable
    here, the full-resolution convergence story lives in the acceptance
    tests."""
    config = ProblemConfig(epsilon=0.1, n_r=48, n_z=48, max_iterations=150)
    gen = make_generator("power_law", p=1.0)
    return run(config, gen)


@pytest.fixture()
def rng():
    return np.random.default_rng(42)
