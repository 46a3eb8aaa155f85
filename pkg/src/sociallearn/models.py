"""Domain types: hypotheses, likelihood families, observations, beliefs.

Beliefs are kept in the natural-log domain throughout (as 1-D arrays of
length H, or stacked arrays whose last axis runs over hypotheses).  Belief
components decay exponentially during learning, so linear-domain storage
would underflow within a few hundred iterations.  Hypothesis indices are
0-based everywhere in the code; the CLI converts from the 1-based labels
used in configuration files.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

__all__ = [
    "HypothesisSet",
    "GaussianLikelihood",
    "DiscreteLikelihood",
    "LikelihoodModel",
    "uniform_log_beliefs",
    "normalize_log_beliefs",
    "log1mexp",
]

_LOG_2PI = float(np.log(2.0 * np.pi))


class InvalidModelError(ValueError):
    """Raised when a model violates a construction invariant."""


@dataclass(frozen=True)
class HypothesisSet:
    """The hypothesis space plus the designated true and shared hypotheses.

    ``true_index`` and ``tx_index`` may coincide (truth sharing).
    """

    count: int
    true_index: int
    tx_index: int

    def __post_init__(self):
        if self.count < 2:
            raise InvalidModelError(f"need at least 2 hypotheses, got {self.count}")
        for name in ("true_index", "tx_index"):
            idx = getattr(self, name)
            if not 0 <= idx < self.count:
                raise InvalidModelError(
                    f"{name}={idx} out of range for {self.count} hypotheses"
                )

    @property
    def non_tx(self) -> np.ndarray:
        """Indices of the hypotheses that are not shared."""
        return np.array([t for t in range(self.count) if t != self.tx_index])


@dataclass(frozen=True)
class GaussianLikelihood:
    """Unit-variance Gaussian family: one mean per hypothesis."""

    means: np.ndarray

    def __post_init__(self):
        means = np.asarray(self.means, dtype=float)
        if means.ndim != 1 or means.size < 2:
            raise InvalidModelError("means must be a 1-D array with >= 2 entries")
        if not np.all(np.isfinite(means)):
            raise InvalidModelError("Gaussian means must be finite")
        object.__setattr__(self, "means", means)

    @property
    def n_hypotheses(self) -> int:
        return self.means.size

    def log_likelihood(self, theta: int, x) -> float | np.ndarray:
        """ln f(x | theta) for scalar or array-valued x."""
        x = np.asarray(x, dtype=float)
        out = -0.5 * (x - self.means[theta]) ** 2 - 0.5 * _LOG_2PI
        return float(out) if out.ndim == 0 else out

    def log_likelihood_matrix(self, x) -> np.ndarray:
        """ln f(x | theta) for all theta; output shape x.shape + (H,)."""
        x = np.asarray(x, dtype=float)
        return -0.5 * (x[..., None] - self.means) ** 2 - 0.5 * _LOG_2PI

    def sample(self, theta: int, rng: np.random.Generator, size=None):
        return rng.normal(self.means[theta], 1.0, size=size)


@dataclass(frozen=True)
class DiscreteLikelihood:
    """Discrete family: H rows of strictly positive pmfs over a finite alphabet."""

    pmf: np.ndarray
    min_cell: float = 1e-12
    log_pmf: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pmf = np.asarray(self.pmf, dtype=float)
        if pmf.ndim != 2 or pmf.shape[0] < 2:
            raise InvalidModelError("pmf must be a 2-D table with >= 2 rows")
        if np.any(pmf < self.min_cell):
            raise InvalidModelError(
                f"all pmf cells must be >= {self.min_cell} (finite divergences)"
            )
        rowsums = pmf.sum(axis=1)
        if np.any(np.abs(rowsums - 1.0) > 1e-12):
            bad = int(np.argmax(np.abs(rowsums - 1.0)))
            raise InvalidModelError(
                f"pmf row {bad} sums to {rowsums[bad]:.15f}, expected 1"
            )
        object.__setattr__(self, "pmf", pmf)
        object.__setattr__(self, "log_pmf", np.log(pmf))

    @property
    def n_hypotheses(self) -> int:
        return self.pmf.shape[0]

    @property
    def n_symbols(self) -> int:
        return self.pmf.shape[1]

    def log_likelihood(self, theta: int, x) -> float | np.ndarray:
        x = np.asarray(x)
        if not np.issubdtype(x.dtype, np.integer):
            raise InvalidModelError("discrete model expects integer symbol indices")
        if np.any(x < 0) or np.any(x >= self.n_symbols):
            raise InvalidModelError("symbol index out of alphabet bounds")
        out = self.log_pmf[theta, x]
        return float(out) if out.ndim == 0 else out

    def log_likelihood_matrix(self, x) -> np.ndarray:
        x = np.asarray(x)
        if not np.issubdtype(x.dtype, np.integer):
            raise InvalidModelError("discrete model expects integer symbol indices")
        return self.log_pmf.T[x]

    def sample(self, theta: int, rng: np.random.Generator, size=None):
        cum = np.cumsum(self.pmf[theta])
        u = rng.random(size=size)
        out = np.searchsorted(cum, u, side="right")
        return np.minimum(out, self.n_symbols - 1)


LikelihoodModel = GaussianLikelihood | DiscreteLikelihood


def fictitious_log_likelihood(model: LikelihoodModel, tx_index: int, x):
    """Log-density of the uniform mixture of all non-shared hypotheses.

    Computed as logsumexp over the H-1 component log-likelihoods minus
    log(H-1), so it stays stable even when the components are many orders
    of magnitude apart.
    """
    H = model.n_hypotheses
    keep = [t for t in range(H) if t != tx_index]
    ll = model.log_likelihood_matrix(x)[..., keep]
    return logsumexp(ll, axis=-1) - np.log(H - 1)


def uniform_log_beliefs(n_hypotheses: int) -> np.ndarray:
    return np.full(n_hypotheses, -np.log(n_hypotheses))


def normalize_log_beliefs(log_b: np.ndarray) -> np.ndarray:
    """Project log-beliefs back onto the simplex (last axis)."""
    return log_b - logsumexp(log_b, axis=-1, keepdims=True)


def log1mexp(x: np.ndarray) -> np.ndarray:
    """Stable log(1 - exp(x)) for x < 0."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < -np.log(2.0)
    out[small] = np.log1p(-np.exp(x[small]))
    out[~small] = np.log(-np.expm1(x[~small]))
    return out
