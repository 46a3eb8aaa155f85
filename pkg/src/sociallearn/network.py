"""Directed agent networks with left-stochastic combination matrices.

Column k of the weight matrix holds the weights agent k assigns to its
in-neighbors; columns sum to one.  Strong connectivity plus at least one
self-loop makes the matrix primitive, which guarantees a strictly positive
unit-eigenvalue eigenvector (the Perron vector) reachable by power
iteration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "NetworkModel",
    "TopologyError",
    "PerronConvergenceError",
    "build_averaging_matrix",
    "verify_strongly_connected",
    "perron_vector",
    "network_average_divergence",
    "preset_adjacency",
]


class TopologyError(ValueError):
    """Invalid or disconnected network topology."""


class PerronConvergenceError(RuntimeError):
    def __init__(self, residual: float, max_iters: int):
        super().__init__(
            f"power iteration did not converge in {max_iters} steps "
            f"(residual {residual:.3e})"
        )
        self.residual = residual


@dataclass(frozen=True)
class NetworkModel:
    """K x K left-stochastic combination matrix over a directed graph."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise TopologyError("weights must be a square matrix")
        if np.any(w < 0):
            raise TopologyError("weights must be nonnegative")
        colsums = w.sum(axis=0)
        if np.any(np.abs(colsums - 1.0) > 1e-12):
            bad = int(np.argmax(np.abs(colsums - 1.0)))
            raise TopologyError(
                f"column {bad} sums to {colsums[bad]:.15f}, expected 1 "
                "(left-stochastic)"
            )
        object.__setattr__(self, "weights", w)

    @property
    def n_agents(self) -> int:
        return self.weights.shape[0]

    @property
    def self_weights(self) -> np.ndarray:
        return np.diag(self.weights)


def build_averaging_matrix(adjacency: np.ndarray, lam: float) -> NetworkModel:
    """Parametrized averaging rule: self-weight lam, the rest split uniformly.

    ``adjacency[l, k]`` is True when agent k listens to agent l.  All
    self-loops must be present and the graph strongly connected; lam must
    lie strictly inside (0, 1), since lam=1 stops diffusion and lam=0
    removes the self-loops required by the self-aware strategy.
    """
    adj = np.asarray(adjacency, dtype=bool)
    K = adj.shape[0]
    if adj.shape != (K, K):
        raise TopologyError("adjacency must be square")
    if not (0.0 < lam < 1.0):
        raise TopologyError(f"lambda must be in the open interval (0, 1), got {lam}")
    if not np.all(np.diag(adj)):
        missing = int(np.argmin(np.diag(adj)))
        raise TopologyError(f"agent {missing} is missing its self-loop")
    if not _strongly_connected(adj):
        raise TopologyError("adjacency graph is not strongly connected")

    weights = np.zeros((K, K))
    for k in range(K):
        neighbors = np.flatnonzero(adj[:, k])
        neighbors = neighbors[neighbors != k]
        weights[k, k] = lam if neighbors.size else 1.0
        if neighbors.size:
            weights[neighbors, k] = (1.0 - lam) / neighbors.size
    return NetworkModel(weights)


def _reachable(adj: np.ndarray, start: int) -> np.ndarray:
    K = adj.shape[0]
    seen = np.zeros(K, dtype=bool)
    stack = [start]
    seen[start] = True
    while stack:
        node = stack.pop()
        for nxt in np.flatnonzero(adj[node]):
            if not seen[nxt]:
                seen[nxt] = True
                stack.append(nxt)
    return seen


def _strongly_connected(adj: np.ndarray) -> bool:
    # Two-pass reachability: node 0 reaches everyone, everyone reaches node 0.
    return bool(_reachable(adj, 0).all() and _reachable(adj.T, 0).all())


def verify_strongly_connected(net: NetworkModel) -> bool:
    """True iff every agent reaches every agent over positive-weight edges."""
    return _strongly_connected(net.weights > 0)


def perron_vector(
    net: NetworkModel, tol: float = 1e-12, max_iters: int = 100_000
) -> np.ndarray:
    """Positive unit-sum eigenvector of A at eigenvalue 1, by power iteration."""
    A = net.weights
    K = net.n_agents
    if not verify_strongly_connected(net):
        raise TopologyError("Perron vector requires a strongly connected network")
    if not np.any(np.diag(A) > 0):
        raise TopologyError("Perron vector requires at least one self-loop")
    v = np.full(K, 1.0 / K)
    residual = np.inf
    for _ in range(max_iters):
        v_next = A @ v
        v_next /= v_next.sum()
        residual = float(np.max(np.abs(A @ v_next - v_next)))
        v = v_next
        if residual <= tol:
            break
    else:
        raise PerronConvergenceError(residual, max_iters)
    if np.any(v <= 0):
        raise PerronConvergenceError(residual, max_iters)
    return v


def network_average_divergence(v: np.ndarray, per_agent: np.ndarray) -> float:
    """Perron-weighted average of per-agent divergences."""
    v = np.asarray(v, dtype=float)
    d = np.asarray(per_agent, dtype=float)
    if v.shape != d.shape:
        raise ValueError(f"length mismatch: {v.shape} vs {d.shape}")
    return float(v @ d)


# Committed seed for the 10-agent preset topology.  The published drawing
# does not list its edges, so the preset is a fixed random strongly-connected
# digraph with all self-loops; the qualitative regimes depend on lambda and
# the likelihood assignment, not on the exact edge set.
_PRESET_SEED = 20240
_PRESET_K = 10


def preset_adjacency(name: str = "paper-fig4-like") -> np.ndarray:
    if name != "paper-fig4-like":
        raise TopologyError(f"unknown topology preset {name!r}")
    rng = np.random.default_rng(_PRESET_SEED)
    K = _PRESET_K
    adj = np.eye(K, dtype=bool)
    # Directed ring guarantees strong connectivity; extra random edges
    # roughen the topology so the Perron vector is not uniform.
    for k in range(K):
        adj[k, (k + 1) % K] = True
    extra = rng.random((K, K)) < 0.1
    np.fill_diagonal(extra, False)
    adj |= extra
    return adj
