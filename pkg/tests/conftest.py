"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from metriclp import Domain, MeasurableMap, make_space

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

SPACE_NAMES = ["euclidean3", "spd2", "simplex3", "histogram8", "circle"]


def flat_sym(m: np.ndarray) -> np.ndarray:
    """Row-major flattening of a symmetric matrix into an SPD payload."""
    return np.asarray(m, dtype=np.float64).reshape(-1)


def random_pair(space, rng, n_atoms=8, weights=None):
    """Two random mappings over a shared domain."""
    domain = Domain(weights if weights is not None else rng.uniform(0.1, 2.0, n_atoms))
    f = MeasurableMap(domain, space, space.random_payloads(rng, domain.atom_count))
    g = MeasurableMap(domain, space, space.random_payloads(rng, domain.atom_count))
    return f, g


@pytest.fixture(scope="session")
def spaces():
    return {name: make_space(name) for name in SPACE_NAMES}


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)
