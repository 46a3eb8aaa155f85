"""Monte Carlo experiment engine.

A scenario is run for every requested strategy on a shared observation
stream (common random numbers), so strategy comparisons within a run are
exact rather than statistical.  Runs use independent generator streams
spawned from the master seed, which makes results deterministic and
reproducible regardless of how many runs are requested.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import logsumexp

from .models import (
    DiscreteLikelihood,
    GaussianLikelihood,
    HypothesisSet,
    LikelihoodModel,
    uniform_log_beliefs,
)
from .network import NetworkModel, perron_vector
from .strategies import StrategyKind, log_likelihood_tensor, step_from_log_likelihoods

__all__ = [
    "ScenarioConfig",
    "TrajectoryRecord",
    "RunSummary",
    "SimulationResult",
    "ConfigError",
    "run_scenario",
    "estimate_empirical_rate",
    "binary_reduction_oracle",
    "submartingale_diagnostic",
    "oscillation_diagnostic",
    "write_trajectory_csv",
    "write_summary_json",
]

# Convergence detection: belief threshold plus confirmation window of
# recorded points (hysteresis is cheap given the linear log-slopes).
CONVERGENCE_EPS = 1e-6
CONFIRM_WINDOW = 200

# Floor applied to log-beliefs at serialization time only.
SERIALIZATION_FLOOR = float(np.log(1e-300))


class ConfigError(ValueError):
    """Invalid scenario configuration."""


@dataclass
class ScenarioConfig:
    hypotheses: HypothesisSet
    models: list[LikelihoodModel]
    network: NetworkModel
    strategies: list[StrategyKind]
    horizon: int
    runs: int = 1
    seed: int = 0
    record_stride: int = 10
    initial_log_beliefs: np.ndarray | None = None
    name: str = "scenario"

    def __post_init__(self):
        self.validate()

    def validate(self):
        K = self.network.n_agents
        H = self.hypotheses.count
        if len(self.models) != K:
            raise ConfigError(
                f"{len(self.models)} likelihood models for {K} agents"
            )
        for k, model in enumerate(self.models):
            if model.n_hypotheses != H:
                raise ConfigError(
                    f"agent {k} model has {model.n_hypotheses} hypotheses, "
                    f"expected {H}"
                )
        variants = {type(m) for m in self.models}
        if len(variants) > 1:
            raise ConfigError("all agents must use the same model variant")
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")
        if self.record_stride < 1:
            raise ConfigError("record_stride must be >= 1")
        if not self.strategies:
            raise ConfigError("at least one strategy is required")
        if StrategyKind.PARTIAL_SA in self.strategies and np.any(
            self.network.self_weights <= 0
        ):
            raise ConfigError(
                "the self-aware strategy requires positive self-weights"
            )
        if self.initial_log_beliefs is not None:
            init = np.asarray(self.initial_log_beliefs, dtype=float)
            if init.shape != (K, H):
                raise ConfigError(
                    f"initial beliefs must have shape {(K, H)}, got {init.shape}"
                )
            if np.any(~np.isfinite(init)):
                raise ConfigError("initial beliefs must be finite (all positive)")
            self.initial_log_beliefs = init - logsumexp(
                init, axis=-1, keepdims=True
            )

    def initial_state(self) -> np.ndarray:
        K = self.network.n_agents
        H = self.hypotheses.count
        if self.initial_log_beliefs is not None:
            return self.initial_log_beliefs.copy()
        return np.broadcast_to(uniform_log_beliefs(H), (K, H)).copy()


@dataclass
class TrajectoryRecord:
    """Recorded log-beliefs and derived diagnostic series for one strategy."""

    strategy: StrategyKind
    iterations: np.ndarray  # (n_rec,)
    log_beliefs: np.ndarray  # (n_rec, runs, K, H)
    m_stat: np.ndarray  # (n_rec, runs): Perron-weighted log-belief at theta_tx
    q_nontx: np.ndarray | None  # (n_rec, runs, K): first non-shared log-ratio
    sa_recursion_residual: float | None = None  # max over the whole run


@dataclass
class RunSummary:
    strategy: str
    classification: list[str]  # per run: LearnedTruth / Mislearned / Undecided
    final_belief_tx: np.ndarray  # (runs, K)
    counts: dict = field(default_factory=dict)


@dataclass
class SimulationResult:
    config: ScenarioConfig
    trajectories: dict[StrategyKind, TrajectoryRecord]
    summaries: dict[StrategyKind, RunSummary]
    observations: np.ndarray  # (horizon, runs, K)


def draw_observations(cfg: ScenarioConfig) -> np.ndarray:
    """Pre-draw the full observation tensor, one stream per run."""
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.runs)
    theta0 = cfg.hypotheses.true_index
    sample_dtype = float if any(
        isinstance(m, GaussianLikelihood) for m in cfg.models
    ) else int
    obs = np.empty((cfg.horizon, cfg.runs, cfg.network.n_agents), dtype=sample_dtype)
    for r, child in enumerate(children):
        rng = np.random.default_rng(child)
        for k, model in enumerate(cfg.models):
            obs[:, r, k] = model.sample(theta0, rng, size=cfg.horizon)
    return obs


def _recorded_iterations(horizon: int, stride: int) -> np.ndarray:
    iters = np.arange(stride, horizon + 1, stride)
    if iters.size == 0 or iters[-1] != horizon:
        iters = np.append(iters, horizon)
    return iters


def run_scenario(cfg: ScenarioConfig) -> SimulationResult:
    obs = draw_observations(cfg)
    hyp = cfg.hypotheses
    tx = hyp.tx_index
    v = perron_vector(cfg.network)
    non_tx = hyp.non_tx
    track_q = hyp.count >= 3
    self_w = cfg.network.self_weights

    log_lik = np.empty(
        (cfg.horizon, cfg.runs, cfg.network.n_agents, hyp.count)
    )
    for i in range(cfg.horizon):
        log_lik[i] = log_likelihood_tensor(cfg.models, obs[i])

    rec_iters = _recorded_iterations(cfg.horizon, cfg.record_stride)
    trajectories: dict[StrategyKind, TrajectoryRecord] = {}
    summaries: dict[StrategyKind, RunSummary] = {}

    for kind in cfg.strategies:
        log_mu = np.broadcast_to(
            cfg.initial_state(), (cfg.runs,) + cfg.initial_state().shape
        ).copy()
        records = np.empty((rec_iters.size,) + log_mu.shape)
        sa_residual = 0.0
        rec_pos = 0
        for i in range(cfg.horizon):
            prev = log_mu
            log_mu = step_from_log_likelihoods(
                log_mu, kind, cfg.network.weights, log_lik[i], tx
            )
            if kind is StrategyKind.PARTIAL_SA and track_q:
                t1, t2 = non_tx[0], non_tx[1]
                llr = log_lik[i][..., t1] - log_lik[i][..., t2]
                q_prev = prev[..., t1] - prev[..., t2]
                q_new = log_mu[..., t1] - log_mu[..., t2]
                resid = np.abs(q_new - self_w * (q_prev + llr)).max()
                sa_residual = max(sa_residual, float(resid))
            if i + 1 == rec_iters[rec_pos]:
                records[rec_pos] = log_mu
                rec_pos += 1
        m_stat = records[..., tx] @ v
        q_series = None
        if track_q:
            q_series = records[..., non_tx[0]] - records[..., non_tx[1]]
        trajectories[kind] = TrajectoryRecord(
            strategy=kind,
            iterations=rec_iters,
            log_beliefs=records,
            m_stat=m_stat,
            q_nontx=q_series,
            sa_recursion_residual=(
                sa_residual if kind is StrategyKind.PARTIAL_SA else None
            ),
        )
        summaries[kind] = _summarize(cfg, trajectories[kind])

    return SimulationResult(cfg, trajectories, summaries, obs)


def _summarize(cfg: ScenarioConfig, traj: TrajectoryRecord) -> RunSummary:
    hyp = cfg.hypotheses
    belief_tx = np.exp(traj.log_beliefs[..., hyp.tx_index])  # (n_rec, runs, K)
    window = min(CONFIRM_WINDOW, belief_tx.shape[0])
    tail = belief_tx[-window:]
    truth_shared = hyp.tx_index == hyp.true_index
    if truth_shared:
        learned = np.all(tail >= 1.0 - CONVERGENCE_EPS, axis=(0, 2))
        mislearned = np.all(tail <= CONVERGENCE_EPS, axis=(0, 2))
    else:
        learned = np.all(tail <= CONVERGENCE_EPS, axis=(0, 2))
        mislearned = np.all(tail >= 1.0 - CONVERGENCE_EPS, axis=(0, 2))
    labels = []
    for r in range(cfg.runs):
        if learned[r]:
            labels.append("LearnedTruth")
        elif mislearned[r]:
            labels.append("Mislearned")
        else:
            labels.append("Undecided")
    counts = {
        lab: labels.count(lab)
        for lab in ("LearnedTruth", "Mislearned", "Undecided")
    }
    return RunSummary(
        strategy=traj.strategy.value,
        classification=labels,
        final_belief_tx=belief_tx[-1],
        counts=counts,
    )


def estimate_empirical_rate(
    traj: TrajectoryRecord,
    theta: int,
    tx_index: int,
    window: tuple[int, int],
) -> tuple[float, float]:
    """Least-squares slope of the non-shared/shared log-ratio over a window.

    Per-run slopes are averaged over agents first; the returned CI is the
    95% normal interval across runs.
    """
    lo, hi = window
    mask = (traj.iterations >= lo) & (traj.iterations <= hi)
    if int(mask.sum()) < 100:
        raise ValueError(
            f"window {window} covers only {int(mask.sum())} recorded points "
            "(need >= 100)"
        )
    iters = traj.iterations[mask].astype(float)
    ratio = (
        traj.log_beliefs[mask, ..., theta] - traj.log_beliefs[mask, ..., tx_index]
    )  # (n_win, runs, K)
    per_agent_mean = ratio.mean(axis=2)  # (n_win, runs)
    x = iters - iters.mean()
    slopes = (x[:, None] * per_agent_mean).sum(axis=0) / (x @ x)
    slope = float(slopes.mean())
    n_runs = slopes.size
    ci = float(1.96 * slopes.std(ddof=1) / np.sqrt(n_runs)) if n_runs > 1 else 0.0
    return slope, ci


def binary_reduction_oracle(cfg: ScenarioConfig) -> float:
    """Max log-belief gap between the H-ary partial strategy and its
    binary reformulation.

    The H-ary problem without self-awareness is replayed as a traditional
    binary test between the shared hypothesis and the aggregate of the
    rest (uniform-mixture likelihood), on the identical observation
    stream; the shared-component beliefs of the two runs must coincide.
    """
    hyp = cfg.hypotheses
    tx = hyp.tx_index
    non_tx = hyp.non_tx
    obs = draw_observations(cfg)
    init = cfg.initial_state()
    init_bin = np.stack(
        [init[:, tx], logsumexp(init[:, non_tx], axis=-1)], axis=-1
    )
    log_mu = np.broadcast_to(init, (cfg.runs,) + init.shape).copy()
    log_mu_bin = np.broadcast_to(init_bin, (cfg.runs,) + init_bin.shape).copy()
    deviation = 0.0
    ln_hm1 = np.log(hyp.count - 1)
    for i in range(cfg.horizon):
        log_lik = log_likelihood_tensor(cfg.models, obs[i])
        log_lik_bin = np.stack(
            [
                log_lik[..., tx],
                logsumexp(log_lik[..., non_tx], axis=-1) - ln_hm1,
            ],
            axis=-1,
        )
        log_mu = step_from_log_likelihoods(
            log_mu, StrategyKind.PARTIAL_NO_SA, cfg.network.weights, log_lik, tx
        )
        log_mu_bin = step_from_log_likelihoods(
            log_mu_bin,
            StrategyKind.TRADITIONAL,
            cfg.network.weights,
            log_lik_bin,
            None,
        )
        gap = np.abs(log_mu[..., tx] - log_mu_bin[..., 0]).max()
        deviation = max(deviation, float(gap))
    return deviation


def submartingale_diagnostic(m_stat: np.ndarray, min_runs: int = 200) -> dict:
    """Fraction of iterations where the run-averaged statistic decreases by
    more than three standard errors (expected near zero when the shared
    hypothesis is true under the self-aware strategy)."""
    n_rec, n_runs = m_stat.shape
    if n_runs < min_runs:
        raise ValueError(f"need at least {min_runs} runs, got {n_runs}")
    diffs = np.diff(m_stat, axis=0)  # (n_rec-1, runs)
    mean_diff = diffs.mean(axis=1)
    se_diff = diffs.std(axis=1, ddof=1) / np.sqrt(n_runs)
    violations = mean_diff < -3.0 * se_diff
    return {
        "violation_rate": float(violations.mean()),
        "n_checked": int(violations.size),
        "all_nonpositive": bool(np.all(m_stat <= 0.0)),
        "final_mean": float(m_stat[-1].mean()),
    }


def oscillation_diagnostic(traj: TrajectoryRecord, late_fraction: float = 0.5) -> dict:
    """Late-window spread of the non-shared log-ratio under self-awareness.

    The ratio must stay bounded (oscillation), in contrast with the
    linearly drifting shared-component log-ratio.
    """
    if traj.q_nontx is None:
        raise ValueError("diagnostic requires H >= 3 (no non-shared pair)")
    n_rec = traj.q_nontx.shape[0]
    start = int(n_rec * (1.0 - late_fraction))
    late = traj.q_nontx[start:]
    return {
        "max_abs_late_q": float(np.abs(late).max()),
        "late_spread": float(late.max() - late.min()),
        "recursion_residual": traj.sa_recursion_residual,
    }


def write_trajectory_csv(path, traj: TrajectoryRecord, run: int = 0) -> None:
    """One row per (iteration, agent, hypothesis); labels are 1-based."""
    beliefs = np.maximum(traj.log_beliefs[:, run], SERIALIZATION_FLOOR)
    n_rec, K, H = beliefs.shape
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "agent", "hypothesis", "log_belief"])
        for i in range(n_rec):
            it = int(traj.iterations[i])
            for k in range(K):
                for h in range(H):
                    writer.writerow([it, k + 1, h + 1, repr(float(beliefs[i, k, h]))])


def write_summary_json(path, result: SimulationResult, extra: dict | None = None):
    payload = {
        "scenario": result.config.name,
        "seed": result.config.seed,
        "horizon": result.config.horizon,
        "runs": result.config.runs,
        "strategies": {},
    }
    for kind, summary in result.summaries.items():
        traj = result.trajectories[kind]
        payload["strategies"][kind.value] = {
            "classification": summary.classification,
            "counts": summary.counts,
            "final_belief_tx_agent1": summary.final_belief_tx[:, 0].tolist(),
            "sa_recursion_residual": traj.sa_recursion_residual,
        }
    if extra:
        payload.update(extra)
    Path(path).write_text(json.dumps(payload, indent=2))
