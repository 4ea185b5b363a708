"""Shared fixtures: the desk-scale probability spaces and generators."""

import numpy as np
import pytest

from rnsl import ProbabilitySpace, make_space


@pytest.fixture
def space2() -> ProbabilitySpace:
    return make_space([0.3, 0.7])


@pytest.fixture
def space4() -> ProbabilitySpace:
    return make_space([0.1, 0.2, 0.3, 0.4])


@pytest.fixture
def space1() -> ProbabilitySpace:
    return make_space([1.0])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260822)
