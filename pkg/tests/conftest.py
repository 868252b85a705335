from __future__ import annotations

import numpy as np
import pytest

from rcmteleop.continuum import ContinuumParams
from rcmteleop.harness.config import RunConfig
from rcmteleop.harness.simulate import build_initial_state, build_model


@pytest.fixture
def params():
    return ContinuumParams()


@pytest.fixture
def kin():
    return build_model(RunConfig())


@pytest.fixture
def default_state():
    return build_initial_state(RunConfig())


def random_bend(rng, params, near_straight_every=0):
    """theta over the usable range, occasionally right next to straight."""
    if near_straight_every and rng.integers(near_straight_every) == 0:
        theta = params.theta0 - rng.uniform(1e-6, 1e-3)
    else:
        theta = rng.uniform(params.theta_min, params.theta0 - 1e-3)
    delta = rng.uniform(-np.pi, np.pi)
    return theta, delta
