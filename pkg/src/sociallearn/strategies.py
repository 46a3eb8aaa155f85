"""Per-iteration belief updates for the three learning strategies.

All operations work on log-belief arrays whose last two axes are
(agent, hypothesis); leading axes (e.g. Monte Carlo runs) broadcast
through unchanged.  Steps are synchronous: every agent forms its
intermediate belief from the same previous state, then every agent
combines.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from scipy.special import logsumexp

from .models import LikelihoodModel, normalize_log_beliefs
from .network import NetworkModel

__all__ = [
    "StrategyKind",
    "NetworkBeliefState",
    "bayesian_update",
    "mask_to_transmitted",
    "combine_no_sa",
    "combine_sa",
    "log_likelihood_tensor",
    "step_network",
]


class StrategyKind(Enum):
    TRADITIONAL = "traditional"
    PARTIAL_NO_SA = "partial-no-sa"
    PARTIAL_SA = "partial-sa"


@dataclass
class NetworkBeliefState:
    """Per-agent log-beliefs plus the iteration counter."""

    log_beliefs: np.ndarray  # (..., K, H)
    iteration: int = 0


def bayesian_update(log_mu: np.ndarray, log_lik: np.ndarray) -> np.ndarray:
    """Local Bayes step: posterior proportional to prior times likelihood."""
    return normalize_log_beliefs(log_mu + log_lik)


def mask_to_transmitted(log_psi: np.ndarray, tx_index: int) -> np.ndarray:
    """Keep only the shared component; split the remaining mass uniformly.

    For H=2 the masking loses nothing, so the input is returned bitwise
    unchanged (this underpins the exact binary equivalence of all three
    strategies).
    """
    H = log_psi.shape[-1]
    if H == 2:
        return log_psi.copy()
    masked = np.empty_like(log_psi)
    tx = log_psi[..., tx_index]
    # 1 - psi(tx) equals the summed non-transmitted mass; summing in the
    # log domain stays finite even when psi(tx) rounds to 1.
    non_tx = [t for t in range(H) if t != tx_index]
    rest = logsumexp(log_psi[..., non_tx], axis=-1) - np.log(H - 1)
    masked[...] = rest[..., None]
    masked[..., tx_index] = tx
    return masked


def combine_no_sa(log_psi_hat: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Log-linear pooling: each agent geometric-averages its in-neighbors."""
    mixed = np.einsum("lk,...lh->...kh", weights, log_psi_hat)
    return normalize_log_beliefs(mixed)


def combine_sa(
    log_psi: np.ndarray, log_psi_hat: np.ndarray, weights: np.ndarray
) -> np.ndarray:
    """Self-aware pooling: own full belief for the self term, masked
    beliefs for the neighbors.

    Implemented as the no-SA mix plus a diagonal correction replacing the
    masked self term with the true one; when masked and true beliefs
    coincide (H=2) the correction is exactly zero.
    """
    self_w = np.diag(weights)
    if np.any(self_w <= 0):
        raise ValueError("self-aware combination requires positive self-weights")
    mixed = np.einsum("lk,...lh->...kh", weights, log_psi_hat)
    mixed = mixed + self_w[:, None] * (log_psi - log_psi_hat)
    return normalize_log_beliefs(mixed)


def log_likelihood_tensor(
    models: list[LikelihoodModel], observations: np.ndarray
) -> np.ndarray:
    """Stack per-agent log-likelihood vectors; observations (..., K) -> (..., K, H)."""
    cols = [m.log_likelihood_matrix(observations[..., k]) for k, m in enumerate(models)]
    return np.stack(cols, axis=-2)


def step_network(
    state: NetworkBeliefState,
    kind: StrategyKind,
    net: NetworkModel,
    models: list[LikelihoodModel],
    observations: np.ndarray,
    tx_index: int | None = None,
) -> NetworkBeliefState:
    """One synchronous network iteration of the chosen strategy."""
    log_lik = log_likelihood_tensor(models, np.asarray(observations))
    log_beliefs = step_from_log_likelihoods(
        state.log_beliefs, kind, net.weights, log_lik, tx_index=tx_index
    )
    return NetworkBeliefState(log_beliefs, state.iteration + 1)


def step_from_log_likelihoods(
    log_mu: np.ndarray,
    kind: StrategyKind,
    weights: np.ndarray,
    log_lik: np.ndarray,
    tx_index: int | None,
) -> np.ndarray:
    """Core transition on precomputed log-likelihoods.

    ``tx_index`` is required for the partial-information strategies and
    ignored by the traditional one.
    """
    log_psi = bayesian_update(log_mu, log_lik)
    if kind is StrategyKind.TRADITIONAL:
        return combine_no_sa(log_psi, weights)
    if tx_index is None:
        raise ValueError("partial-information strategies need a transmitted index")
    log_psi_hat = mask_to_transmitted(log_psi, tx_index)
    if kind is StrategyKind.PARTIAL_NO_SA:
        return combine_no_sa(log_psi_hat, weights)
    if kind is StrategyKind.PARTIAL_SA:
        return combine_sa(log_psi, log_psi_hat, weights)
    raise ValueError(f"unknown strategy {kind!r}")
