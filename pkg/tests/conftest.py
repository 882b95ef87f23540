"""Shared fixtures."""

import numpy as np
import pytest

from pydaar.core.types import PartialledSample
from pydaar.linalg.partial import partial_out
from pydaar.simulation.dgp import DgpSpec, gen_dkm


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def off_diagonal_P():
    """2x2 matrix with zero diagonal and off-diagonal 0.3."""
    return np.array([[0.0, 0.3], [0.3, 0.0]])


@pytest.fixture
def dkm_raw():
    """One DKM sample, n = 100, K = 5, mu2 = 30."""
    return gen_dkm(DgpSpec.dkm(K=5, mu2=30.0), seed=7, replication=0)


@pytest.fixture
def dkm_sample(dkm_raw) -> PartialledSample:
    return partial_out(dkm_raw)
