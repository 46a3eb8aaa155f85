"""Multi-agent social learning with partial belief sharing.

Simulation engine and analysis toolkit for networks of agents that share
only their confidence in a single hypothesis of interest, covering the
traditional full-sharing strategy and the two partial-information
strategies (with and without self-awareness), plus divergence-based
regime prediction and Monte Carlo verification.
"""

from .models import (
    DiscreteLikelihood,
    GaussianLikelihood,
    HypothesisSet,
    fictitious_log_likelihood,
)
from .network import NetworkModel, build_averaging_matrix, perron_vector
from .simulator import ScenarioConfig, run_scenario
from .strategies import StrategyKind

__all__ = [
    "DiscreteLikelihood",
    "GaussianLikelihood",
    "HypothesisSet",
    "fictitious_log_likelihood",
    "NetworkModel",
    "build_averaging_matrix",
    "perron_vector",
    "ScenarioConfig",
    "run_scenario",
    "StrategyKind",
]
