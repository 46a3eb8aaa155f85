"""Combination matrices, connectivity, and the Perron eigenvector."""

import numpy as np
import pytest

from sociallearn.network import (
    NetworkModel,
    PerronConvergenceError,
    TopologyError,
    build_averaging_matrix,
    network_average_divergence,
    perron_vector,
    preset_adjacency,
    verify_strongly_connected,
)
from conftest import random_adjacency


def test_network_model_validates_columns():
    with pytest.raises(TopologyError):
        NetworkModel(np.array([[0.5, 0.5], [0.6, 0.5]]))
    with pytest.raises(TopologyError):
        NetworkModel(np.array([[1.2, 0.0], [-0.2, 1.0]]))
    with pytest.raises(TopologyError):
        NetworkModel(np.ones((2, 3)) / 2)


def test_averaging_rule_full_graph():
    net = build_averaging_matrix(np.ones((2, 2), dtype=bool), 0.5)
    assert np.allclose(net.weights, [[0.5, 0.5], [0.5, 0.5]])


def test_averaging_rule_ring():
    K = 3
    adj = np.eye(K, dtype=bool)
    for k in range(K):
        adj[k, (k + 1) % K] = True
    net = build_averaging_matrix(adj, 0.9)
    assert np.allclose(net.self_weights, 0.9)
    assert np.allclose(net.weights.sum(axis=0), 1.0)
    # column k has exactly one in-neighbor besides itself, with weight 0.1
    off = net.weights - np.diag(net.self_weights)
    assert np.allclose(off[off > 0], 0.1)


def test_averaging_rule_rejects_bad_lambda():
    adj = np.ones((2, 2), dtype=bool)
    for lam in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(TopologyError):
            build_averaging_matrix(adj, lam)


def test_averaging_rule_requires_self_loops_and_connectivity():
    adj = np.ones((3, 3), dtype=bool)
    adj[1, 1] = False
    with pytest.raises(TopologyError):
        build_averaging_matrix(adj, 0.5)
    # two disconnected pairs
    adj = np.kron(np.eye(2, dtype=bool), np.ones((2, 2), dtype=bool))
    with pytest.raises(TopologyError):
        build_averaging_matrix(adj, 0.5)


def test_strong_connectivity_check():
    # one-way chain is not strongly connected
    w = np.array([[1.0, 0.5], [0.0, 0.5]])
    assert not verify_strongly_connected(NetworkModel(w))
    net = build_averaging_matrix(np.ones((3, 3), dtype=bool), 0.4)
    assert verify_strongly_connected(net)


def test_perron_vector_hand_case():
    net = NetworkModel(np.array([[0.8, 0.4], [0.2, 0.6]]))
    v = perron_vector(net)
    np.testing.assert_allclose(v, [2.0 / 3.0, 1.0 / 3.0], atol=1e-12)


def test_perron_vector_doubly_stochastic_is_uniform():
    net = build_averaging_matrix(np.ones((4, 4), dtype=bool), 0.25)
    v = perron_vector(net)
    np.testing.assert_allclose(v, 0.25, atol=1e-12)


def test_perron_vector_preset_residual():
    net = build_averaging_matrix(preset_adjacency(), 0.5)
    v = perron_vector(net)
    assert np.all(v > 0)
    assert v.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(net.weights @ v - v)) <= 1e-10


def test_perron_vector_randomized(rng):
    for _ in range(50):
        K = int(rng.integers(2, 7))
        net = build_averaging_matrix(random_adjacency(rng, K), float(rng.uniform(0.1, 0.9)))
        v = perron_vector(net)
        assert np.all(v > 0)
        assert np.max(np.abs(net.weights @ v - v)) <= 1e-10


def test_perron_requires_connectivity():
    w = np.array([[1.0, 0.5], [0.0, 0.5]])
    with pytest.raises(TopologyError):
        perron_vector(NetworkModel(w))


def test_perron_convergence_error_is_runtime_error():
    assert issubclass(PerronConvergenceError, RuntimeError)


def test_network_average_divergence():
    v = np.array([2.0 / 3.0, 1.0 / 3.0])
    d = np.array([0.3, 0.6])
    assert network_average_divergence(v, d) == pytest.approx(0.4, abs=1e-15)
    with pytest.raises(ValueError):
        network_average_divergence(v, np.array([0.3, 0.6, 0.9]))


def test_preset_adjacency_committed():
    adj = preset_adjacency()
    assert adj.shape == (10, 10)
    assert np.all(np.diag(adj))
    assert np.array_equal(adj, preset_adjacency())  # committed, not resampled
    with pytest.raises(TopologyError):
        preset_adjacency("no-such-preset")
