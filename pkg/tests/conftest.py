"""Shared randomized-case generators for the test suite."""

import numpy as np
import pytest

from sociallearn.models import DiscreteLikelihood, GaussianLikelihood
from sociallearn.network import NetworkModel, build_averaging_matrix


def random_adjacency(rng: np.random.Generator, n_agents: int) -> np.ndarray:
    """Strongly connected digraph with all self-loops: ring plus extras."""
    adj = np.eye(n_agents, dtype=bool)
    for k in range(n_agents):
        adj[k, (k + 1) % n_agents] = True
    extra = rng.random((n_agents, n_agents)) < rng.uniform(0.1, 0.6)
    return adj | extra | np.eye(n_agents, dtype=bool)


def random_network(rng: np.random.Generator, n_agents: int) -> NetworkModel:
    lam = float(rng.uniform(0.05, 0.95))
    return build_averaging_matrix(random_adjacency(rng, n_agents), lam)


def random_gaussian(rng: np.random.Generator, n_hyp: int) -> GaussianLikelihood:
    means = rng.normal(0.0, 2.0, size=n_hyp)
    # keep means separated so divergences are comfortably nonzero
    means += 0.2 * np.arange(n_hyp)
    return GaussianLikelihood(means)


def random_discrete(
    rng: np.random.Generator, n_hyp: int, n_sym: int = 4
) -> DiscreteLikelihood:
    pmf = rng.uniform(0.1, 1.0, size=(n_hyp, n_sym))
    pmf /= pmf.sum(axis=1, keepdims=True)
    return DiscreteLikelihood(pmf)


def random_log_beliefs(rng: np.random.Generator, shape) -> np.ndarray:
    raw = rng.normal(0.0, 3.0, size=shape)
    from scipy.special import logsumexp

    return raw - logsumexp(raw, axis=-1, keepdims=True)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
