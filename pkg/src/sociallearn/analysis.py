"""Divergence computation, assumption checks, and regime classification.

Divergences to a single hypothesis are exact (discrete sums, Gaussian
closed form).  Divergence to the uniform mixture of non-shared hypotheses
has no closed form for Gaussian families, so it is evaluated by adaptive
quadrature (default) or Monte Carlo with a reported confidence interval.
The classifiers implement the sufficient learning/mislearning conditions
for each partial-information strategy; where neither sufficient condition
fires, the verdict is Indeterminate rather than a guess.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import integrate, optimize
from scipy.special import logsumexp

from .models import (
    DiscreteLikelihood,
    GaussianLikelihood,
    HypothesisSet,
    LikelihoodModel,
    fictitious_log_likelihood,
)
from .network import NetworkModel, network_average_divergence, perron_vector

__all__ = [
    "EstimatorConfig",
    "DivergenceProfile",
    "Verdict",
    "RegimeVerdict",
    "kl_divergence",
    "kl_to_fictitious",
    "divergence_profile",
    "classify_regime_no_sa",
    "classify_regime_sa",
    "predicted_rate_no_sa",
    "check_assumption_3",
    "check_assumption_4",
    "likelihood_bound_B",
    "indistinguishable_set",
]

# Threshold under which an exactly-computed divergence counts as zero.
ZERO_DIV_TOL = 1e-12


class NumericalError(RuntimeError):
    """Estimator failed to converge."""


@dataclass(frozen=True)
class EstimatorConfig:
    """How to evaluate Gaussian-to-mixture divergences."""

    method: str = "quadrature"  # or "mc"
    quad_tol: float = 1e-9
    mc_samples: int = 1_000_000
    seed: int = 0


class Verdict(Enum):
    LEARN = "Learn"
    MISLEARN = "Mislearn"
    INDETERMINATE = "Indeterminate"


@dataclass
class RegimeVerdict:
    strategy: str
    verdict: Verdict
    margin: float
    predicted_rate: float | None = None
    supporting: dict = field(default_factory=dict)


@dataclass
class DivergenceProfile:
    """All divergences entering the regime conditions, for one scenario."""

    hypotheses: HypothesisSet
    d: np.ndarray  # (K, H) per-agent divergences d_k(theta)
    d_mix: np.ndarray  # (K,) per-agent divergence to the non-shared mixture
    d_mix_ci: np.ndarray  # (K,) confidence half-widths (0 where exact)
    perron: np.ndarray  # (K,)
    d_ave: np.ndarray  # (H,)
    d_mix_ave: float
    method: str = "exact"

    @property
    def ci_ave(self) -> float:
        return float(self.perron @ self.d_mix_ci)


def kl_divergence(model: LikelihoodModel, theta_true: int, theta: int) -> float:
    """Divergence between the true likelihood and that of ``theta``."""
    if isinstance(model, GaussianLikelihood):
        delta = model.means[theta_true] - model.means[theta]
        return float(0.5 * delta * delta)
    p = model.pmf[theta_true]
    q = model.pmf[theta]
    return float(np.sum(p * (np.log(p) - np.log(q))))


def kl_to_fictitious(
    model: LikelihoodModel,
    theta_true: int,
    tx_index: int,
    estimator: EstimatorConfig | None = None,
) -> tuple[float, float]:
    """Divergence from the true likelihood to the uniform non-shared mixture.

    Returns (value, confidence half-width); the half-width is zero for
    exact discrete summation and the quadrature error bound otherwise.
    """
    estimator = estimator or EstimatorConfig()
    H = model.n_hypotheses
    if isinstance(model, DiscreteLikelihood):
        keep = [t for t in range(H) if t != tx_index]
        p = model.pmf[theta_true]
        log_mix = logsumexp(model.log_pmf[keep], axis=0) - np.log(H - 1)
        return float(np.sum(p * (np.log(p) - log_mix))), 0.0

    if estimator.method == "mc":
        rng = np.random.default_rng(estimator.seed)
        x = model.sample(theta_true, rng, size=estimator.mc_samples)
        terms = model.log_likelihood(theta_true, x) - fictitious_log_likelihood(
            model, tx_index, x
        )
        value = float(np.mean(terms))
        # 99% CI half-width
        half = float(2.576 * np.std(terms, ddof=1) / np.sqrt(terms.size))
        return value, half

    mu0 = model.means[theta_true]

    def integrand(x):
        f0 = np.exp(model.log_likelihood(theta_true, x))
        return f0 * (
            model.log_likelihood(theta_true, x)
            - fictitious_log_likelihood(model, tx_index, x)
        )

    lo = min(model.means.min(), mu0) - 10.0
    hi = max(model.means.max(), mu0) + 10.0
    value, err = integrate.quad(
        integrand,
        lo,
        hi,
        points=sorted(set(float(m) for m in model.means)),
        epsabs=estimator.quad_tol,
        epsrel=estimator.quad_tol,
        limit=200,
    )
    if not np.isfinite(value) or err > max(1e-6, 100 * estimator.quad_tol):
        raise NumericalError(f"quadrature failed (value={value}, err={err})")
    return float(value), float(err)


def divergence_profile(
    hyp: HypothesisSet,
    models: list[LikelihoodModel],
    net: NetworkModel,
    estimator: EstimatorConfig | None = None,
) -> DivergenceProfile:
    """Assemble every divergence needed by the regime classifiers."""
    estimator = estimator or EstimatorConfig()
    K = len(models)
    H = hyp.count
    d = np.zeros((K, H))
    d_mix = np.zeros(K)
    d_mix_ci = np.zeros(K)
    for k, model in enumerate(models):
        for theta in range(H):
            d[k, theta] = kl_divergence(model, hyp.true_index, theta)
        d_mix[k], d_mix_ci[k] = kl_to_fictitious(
            model, hyp.true_index, hyp.tx_index, estimator
        )
    v = perron_vector(net)
    d_ave = np.array([network_average_divergence(v, d[:, t]) for t in range(H)])
    d_mix_ave = network_average_divergence(v, d_mix)
    method = "exact" if all(isinstance(m, DiscreteLikelihood) for m in models) else (
        estimator.method
    )
    return DivergenceProfile(hyp, d, d_mix, d_mix_ci, v, d_ave, d_mix_ave, method)


def _tie_tol(profile: DivergenceProfile) -> float:
    return max(1e-9, 3.0 * profile.ci_ave)


def predicted_rate_no_sa(profile: DivergenceProfile) -> float:
    """Almost-sure slope of the per-iteration non-shared/shared log-ratio."""
    return float(profile.d_ave[profile.hypotheses.tx_index] - profile.d_mix_ave)


def classify_regime_no_sa(profile: DivergenceProfile) -> RegimeVerdict:
    """Dichotomy for the strategy without self-awareness.

    The shared-hypothesis belief goes to 0 when the shared hypothesis is
    easier to tell from the truth than the non-shared mixture, and to 1 in
    the opposite case; a knife-edge tie is reported as Indeterminate.
    """
    tx = profile.hypotheses.tx_index
    diff = float(profile.d_ave[tx] - profile.d_mix_ave)
    # Positive margin always means the truthful outcome: rejection of a
    # false shared hypothesis, acceptance of a true one.
    margin = diff if tx != profile.hypotheses.true_index else -diff
    if abs(margin) <= _tie_tol(profile):
        verdict = Verdict.INDETERMINATE
    elif margin > 0:
        verdict = Verdict.LEARN
    else:
        verdict = Verdict.MISLEARN
    return RegimeVerdict(
        strategy="partial-no-sa",
        verdict=verdict,
        margin=margin,
        predicted_rate=predicted_rate_no_sa(profile),
        supporting={
            "d_ave_tx": float(profile.d_ave[tx]),
            "d_ave_mix": profile.d_mix_ave,
        },
    )


def classify_regime_sa(
    profile: DivergenceProfile, net: NetworkModel, bound_b: float | None
) -> RegimeVerdict:
    """Sufficient conditions for the self-aware strategy.

    Learning is guaranteed above the arithmetic mean of the non-shared
    divergences; mislearning is only certifiable under bounded likelihood
    ratios (``bound_b``), below a threshold that shrinks as self-weights
    grow.  In between lies a gray region: Indeterminate.
    """
    hyp = profile.hypotheses
    tx = hyp.tx_index
    non_tx = hyp.non_tx
    d_ave_tx = float(profile.d_ave[tx])
    learn_threshold = float(profile.d_ave[non_tx].mean())
    self_w = net.self_weights
    supporting = {
        "d_ave_tx": d_ave_tx,
        "learn_threshold": learn_threshold,
        "d_ave_mix": profile.d_mix_ave,
        "bound_b": bound_b,
    }
    tol = _tie_tol(profile)
    if tx == hyp.true_index:
        # Truth sharing: covered by the truth-learning theorem, the
        # theta_tx != theta_0 dichotomy does not apply.
        verdict = Verdict.LEARN if profile.d_mix_ave > tol else Verdict.INDETERMINATE
        return RegimeVerdict("partial-sa", verdict, profile.d_mix_ave, None, supporting)
    if d_ave_tx > learn_threshold + tol:
        return RegimeVerdict(
            "partial-sa", Verdict.LEARN, d_ave_tx - learn_threshold, None, supporting
        )
    if bound_b is not None:
        mislearn_threshold = profile.d_mix_ave - float(
            np.sum(self_w * (profile.d_mix + profile.perron * bound_b))
        )
        supporting["mislearn_threshold"] = mislearn_threshold
        if d_ave_tx < mislearn_threshold - tol:
            return RegimeVerdict(
                "partial-sa",
                Verdict.MISLEARN,
                d_ave_tx - mislearn_threshold,
                None,
                supporting,
            )
    return RegimeVerdict("partial-sa", Verdict.INDETERMINATE, 0.0, None, supporting)


def indistinguishable_set(
    model: LikelihoodModel, theta_true: int, tol: float = ZERO_DIV_TOL
) -> list[int]:
    """Hypotheses an agent cannot tell from the truth."""
    return [
        t
        for t in range(model.n_hypotheses)
        if kl_divergence(model, theta_true, t) <= tol
    ]


def check_assumption_3(
    models: list[LikelihoodModel],
    theta_true: int,
    estimator: EstimatorConfig | None = None,
) -> tuple[bool, int | None]:
    """Clear-sighted agent for the no-SA strategy under truth sharing.

    Some agent must have a nonempty distinguishable set and positive
    divergence to the uniform mixture of non-true hypotheses.
    """
    estimator = estimator or EstimatorConfig()
    for k, model in enumerate(models):
        dist = [
            t for t in range(model.n_hypotheses)
            if t not in indistinguishable_set(model, theta_true)
        ]
        if not dist:
            continue
        value, ci = kl_to_fictitious(model, theta_true, theta_true, estimator)
        if value > max(ZERO_DIV_TOL, 3.0 * ci):
            return True, k
    return False, None


def _tv_to_mixture(p0: np.ndarray, rows: np.ndarray, alpha: np.ndarray) -> float:
    return float(0.5 * np.sum(np.abs(p0 - alpha @ rows)))


def check_assumption_4(
    model: LikelihoodModel, theta_true: int, tol: float = 1e-9
) -> tuple[bool, float]:
    """Clear-sighted agent for the SA strategy: the true likelihood stays
    at total-variation distance >= c from every convex mixture of the
    distinguishable likelihoods.

    For Gaussian families with distinct means the condition always holds
    and is reported analytically.  For discrete models the minimal TV
    distance is an exact linear program over the mixture simplex.
    """
    dist = [
        t for t in range(model.n_hypotheses)
        if t not in indistinguishable_set(model, theta_true)
    ]
    if not dist:
        return False, 0.0
    if isinstance(model, GaussianLikelihood):
        # A finite Gaussian mixture with components distinct from f0 can
        # never coincide with the single Gaussian f0.
        distinct = all(model.means[t] != model.means[theta_true] for t in dist)
        return distinct, float("inf") if distinct else 0.0

    p0 = model.pmf[theta_true]
    rows = model.pmf[dist]
    n_mix = len(dist)
    n_sym = p0.size
    # Minimize 0.5 * sum_x t_x  s.t.  t >= +-(p0 - alpha @ rows), alpha in simplex.
    # Variables: [alpha (n_mix), t (n_sym)].
    c = np.concatenate([np.zeros(n_mix), 0.5 * np.ones(n_sym)])
    a_ub = np.block(
        [[-rows.T, -np.eye(n_sym)], [rows.T, -np.eye(n_sym)]]
    )
    b_ub = np.concatenate([-p0, p0])
    a_eq = np.concatenate([np.ones(n_mix), np.zeros(n_sym)])[None, :]
    res = optimize.linprog(
        c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0], bounds=(0, None)
    )
    if not res.success:
        raise NumericalError(f"TV minimization failed: {res.message}")
    c_min = float(res.fun)
    return c_min > tol, c_min


def likelihood_bound_B(
    models: list[LikelihoodModel], tx_index: int
) -> float | None:
    """Largest absolute log-likelihood ratio between non-shared hypotheses.

    None for Gaussian models, whose log-ratios are unbounded over the
    signal space.
    """
    if any(isinstance(m, GaussianLikelihood) for m in models):
        return None
    bound = 0.0
    for model in models:
        keep = [t for t in range(model.n_hypotheses) if t != tx_index]
        logs = model.log_pmf[keep]
        diff = np.abs(logs[:, None, :] - logs[None, :, :])
        bound = max(bound, float(diff.max()))
    return bound
