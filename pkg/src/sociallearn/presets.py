"""Named scenario presets.

``gaussian-study`` reproduces the continuous-observation study: three
unit-variance Gaussian signal models with means 0, 0.5 and 5, assigned to
three agent groups so that no agent can identify the truth alone, over
the committed 10-agent topology.

``discrete-study`` is the discrete-observation analog over symbols
{0, 1, 2}.  The published figure does not print its pmf values, so these
pmfs are repo-chosen to realize the same qualitative regimes (shared
hypothesis 2 confusable with the truth, hypothesis 3 clearly separated),
which the regime classifier verifies.

``tiny-k2h3`` is a hand-checkable two-agent case used by unit tests, and
``sa-mislearn-bound`` is a committed fixture in the certified-mislearning
region of the self-aware strategy (bounded likelihood ratios, small
self-weights).
"""

from __future__ import annotations

import numpy as np

from .models import DiscreteLikelihood, GaussianLikelihood, HypothesisSet
from .network import NetworkModel, build_averaging_matrix, preset_adjacency
from .simulator import ConfigError, ScenarioConfig
from .strategies import StrategyKind

__all__ = ["PRESET_NAMES", "build_preset"]

ALL_STRATEGIES = [
    StrategyKind.TRADITIONAL,
    StrategyKind.PARTIAL_NO_SA,
    StrategyKind.PARTIAL_SA,
]

GAUSSIAN_MEANS = (0.0, 0.5, 5.0)

# Rows of the discrete family (one pmf per signal model f1, f2, f3).
DISCRETE_PMFS = (
    (0.60, 0.30, 0.10),
    (0.50, 0.35, 0.15),
    (0.10, 0.20, 0.70),
)

# Identifiability limitations: per agent group, which signal model is used
# for each of the three hypotheses.
GROUP_ASSIGNMENTS = (
    (slice(0, 3), (0, 0, 2)),   # agents 1-3: theta 1,2 -> f1, theta 3 -> f3
    (slice(3, 6), (0, 1, 1)),   # agents 4-6: theta 1 -> f1, theta 2,3 -> f2
    (slice(6, 10), (0, 1, 0)),  # agents 7-10: theta 1,3 -> f1, theta 2 -> f2
)

PRESET_NAMES = (
    "gaussian-study",
    "discrete-study",
    "tiny-k2h3",
    "sa-mislearn-bound",
)


def _grouped_models(family: str) -> list:
    models = [None] * 10
    for agents, assignment in GROUP_ASSIGNMENTS:
        for k in range(*agents.indices(10)):
            if family == "gaussian":
                models[k] = GaussianLikelihood(
                    np.array([GAUSSIAN_MEANS[j] for j in assignment])
                )
            else:
                models[k] = DiscreteLikelihood(
                    np.array([DISCRETE_PMFS[j] for j in assignment])
                )
    return models


def build_preset(
    name: str,
    lam: float | None = None,
    theta_tx: int = 0,
    seed: int = 0,
    horizon: int = 3000,
    runs: int = 1,
    record_stride: int = 10,
    strategies: list[StrategyKind] | None = None,
) -> ScenarioConfig:
    """Build a validated scenario from a preset name; theta_tx is 0-based."""
    strategies = strategies or list(ALL_STRATEGIES)
    if name == "gaussian-study" or name == "discrete-study":
        family = "gaussian" if name.startswith("gaussian") else "discrete"
        net = build_averaging_matrix(
            preset_adjacency(), 0.5 if lam is None else lam
        )
        return ScenarioConfig(
            hypotheses=HypothesisSet(3, true_index=0, tx_index=theta_tx),
            models=_grouped_models(family),
            network=net,
            strategies=strategies,
            horizon=horizon,
            runs=runs,
            seed=seed,
            record_stride=record_stride,
            name=name,
        )
    if name == "tiny-k2h3":
        net = build_averaging_matrix(
            np.ones((2, 2), dtype=bool), 0.5 if lam is None else lam
        )
        model = GaussianLikelihood(np.array([0.0, 1.0, 2.0]))
        return ScenarioConfig(
            hypotheses=HypothesisSet(3, true_index=0, tx_index=theta_tx),
            models=[model, model],
            network=net,
            strategies=strategies,
            horizon=horizon,
            runs=runs,
            seed=seed,
            record_stride=record_stride,
            name=name,
        )
    if name == "sa-mislearn-bound":
        # Shared hypothesis observationally identical to the truth; the
        # third row differs mildly so likelihood ratios stay small.  With
        # small self-weights this sits below the certified mislearning
        # threshold of the self-aware strategy.
        f1 = (0.5, 0.3, 0.2)
        f3 = (0.3, 0.4, 0.3)
        model = DiscreteLikelihood(np.array([f1, f1, f3]))
        net = build_averaging_matrix(
            np.ones((2, 2), dtype=bool), 0.02 if lam is None else lam
        )
        return ScenarioConfig(
            hypotheses=HypothesisSet(3, true_index=0, tx_index=1),
            models=[model, model],
            network=net,
            strategies=strategies,
            horizon=horizon,
            runs=runs,
            seed=seed,
            record_stride=record_stride,
            name=name,
        )
    raise ConfigError(
        f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}"
    )
