"""Divergences, assumption checks, and regime classification."""

import numpy as np
import pytest

from sociallearn.analysis import (
    EstimatorConfig,
    Verdict,
    check_assumption_3,
    check_assumption_4,
    classify_regime_no_sa,
    classify_regime_sa,
    divergence_profile,
    indistinguishable_set,
    kl_divergence,
    kl_to_fictitious,
    likelihood_bound_B,
    predicted_rate_no_sa,
)
from sociallearn.models import DiscreteLikelihood, GaussianLikelihood, HypothesisSet
from sociallearn.network import build_averaging_matrix, perron_vector
from sociallearn.presets import build_preset
from conftest import random_discrete, random_gaussian, random_network


def test_kl_gaussian_closed_form():
    model = GaussianLikelihood(np.array([0.0, 0.5, 5.0]))
    assert kl_divergence(model, 0, 0) == 0.0
    assert kl_divergence(model, 0, 1) == pytest.approx(0.125, abs=1e-15)
    assert kl_divergence(model, 0, 2) == pytest.approx(12.5, abs=1e-12)


def test_kl_discrete_exact_sum():
    model = DiscreteLikelihood(np.array([[0.5, 0.3, 0.2], [0.2, 0.3, 0.5]]))
    expect = 0.5 * np.log(0.5 / 0.2) + 0.2 * np.log(0.2 / 0.5)
    assert kl_divergence(model, 0, 1) == pytest.approx(expect, abs=1e-15)


def test_kl_nonnegative_randomized(rng):
    for _ in range(200):
        H = int(rng.integers(2, 6))
        model = random_gaussian(rng, H) if rng.integers(2) else random_discrete(rng, H)
        for t in range(H):
            assert kl_divergence(model, 0, t) >= 0.0
        assert kl_divergence(model, 0, 0) == 0.0


def test_kl_to_fictitious_h2_equals_pairwise():
    model = GaussianLikelihood(np.array([0.0, 1.0]))
    value, ci = kl_to_fictitious(model, 0, 0)
    assert value == pytest.approx(kl_divergence(model, 0, 1), abs=1e-9)
    assert ci <= 1e-6


def test_kl_to_fictitious_discrete_exact():
    model = DiscreteLikelihood(
        np.array([[0.6, 0.3, 0.1], [0.5, 0.35, 0.15], [0.1, 0.2, 0.7]])
    )
    mix = 0.5 * (model.pmf[0] + model.pmf[2])
    expect = float(np.sum(model.pmf[0] * np.log(model.pmf[0] / mix)))
    value, ci = kl_to_fictitious(model, 0, 1)
    assert ci == 0.0
    assert value == pytest.approx(expect, abs=1e-15)


def test_kl_to_fictitious_quadrature_vs_mc():
    model = GaussianLikelihood(np.array([0.0, 0.5, 5.0]))
    quad, _ = kl_to_fictitious(model, 0, 2)
    mc, half = kl_to_fictitious(
        model, 0, 2, EstimatorConfig(method="mc", mc_samples=400_000, seed=5)
    )
    assert abs(quad - mc) <= max(3 * half, 1e-3)


def test_kl_to_fictitious_jensen_bounds():
    # mixture divergence is at most the average of the component
    # divergences and at least their minimum minus log(H-1)
    model = GaussianLikelihood(np.array([0.0, 0.5, 5.0]))
    value, _ = kl_to_fictitious(model, 0, 2)  # mixture of means 0, 0.5
    upper = 0.5 * (kl_divergence(model, 0, 0) + kl_divergence(model, 0, 1))
    assert 0.0 < value <= upper + 1e-9
    # the true density is a mixture component here, so the bound is loose:
    # exact value sits in (0, 0.0625]
    assert value <= 0.0625 + 1e-9


def test_divergence_profile_shapes_and_average():
    cfg = build_preset("gaussian-study", lam=0.5, theta_tx=1)
    profile = divergence_profile(cfg.hypotheses, cfg.models, cfg.network)
    K, H = 10, 3
    assert profile.d.shape == (K, H)
    assert profile.d_mix.shape == (K,)
    v = perron_vector(cfg.network)
    np.testing.assert_allclose(profile.perron, v, atol=1e-12)
    np.testing.assert_allclose(profile.d_ave, profile.d.T @ v, atol=1e-12)
    assert profile.d_mix_ave == pytest.approx(float(v @ profile.d_mix), abs=1e-12)
    assert np.all(profile.d >= 0)
    # truth is always indistinguishable from itself
    np.testing.assert_allclose(profile.d[:, 0], 0.0, atol=1e-15)


def test_classifier_no_sa_study_verdicts():
    # shared hypothesis 2 is confusable with the truth -> Mislearn;
    # hypothesis 3 is well separated -> Learn; sharing the truth -> Learn
    for preset in ("gaussian-study", "discrete-study"):
        for tx, expect in ((0, Verdict.LEARN), (1, Verdict.MISLEARN), (2, Verdict.LEARN)):
            cfg = build_preset(preset, lam=0.5, theta_tx=tx)
            profile = divergence_profile(cfg.hypotheses, cfg.models, cfg.network)
            verdict = classify_regime_no_sa(profile)
            assert verdict.verdict is expect, (preset, tx)
            # positive margin always corresponds to the truthful outcome
            assert (verdict.margin > 0) == (expect is Verdict.LEARN)


def test_predicted_rate_matches_margin_for_false_tx():
    cfg = build_preset("gaussian-study", lam=0.5, theta_tx=2)
    profile = divergence_profile(cfg.hypotheses, cfg.models, cfg.network)
    verdict = classify_regime_no_sa(profile)
    assert verdict.predicted_rate == pytest.approx(predicted_rate_no_sa(profile))
    assert verdict.predicted_rate == pytest.approx(verdict.margin)


def test_classifier_sa_learn_condition():
    cfg = build_preset("gaussian-study", lam=0.5, theta_tx=2)
    profile = divergence_profile(cfg.hypotheses, cfg.models, cfg.network)
    verdict = classify_regime_sa(profile, cfg.network, None)
    assert verdict.verdict is Verdict.LEARN
    assert verdict.supporting["d_ave_tx"] > verdict.supporting["learn_threshold"]


def test_classifier_sa_truth_sharing_learns():
    cfg = build_preset("discrete-study", lam=0.5, theta_tx=0)
    profile = divergence_profile(cfg.hypotheses, cfg.models, cfg.network)
    bound = likelihood_bound_B(cfg.models, 0)
    verdict = classify_regime_sa(profile, cfg.network, bound)
    assert verdict.verdict is Verdict.LEARN


def test_classifier_sa_certified_mislearning_fixture():
    cfg = build_preset("sa-mislearn-bound")
    profile = divergence_profile(cfg.hypotheses, cfg.models, cfg.network)
    bound = likelihood_bound_B(cfg.models, cfg.hypotheses.tx_index)
    verdict = classify_regime_sa(profile, cfg.network, bound)
    assert verdict.verdict is Verdict.MISLEARN
    assert verdict.margin < 0
    assert verdict.supporting["mislearn_threshold"] > 0


def test_classifier_sa_gray_region_is_indeterminate():
    # without a likelihood-ratio bound the mislearning condition can
    # never fire, so a scenario failing the learn condition is gray
    cfg = build_preset("gaussian-study", lam=0.9, theta_tx=1)
    profile = divergence_profile(cfg.hypotheses, cfg.models, cfg.network)
    verdict = classify_regime_sa(profile, cfg.network, None)
    assert verdict.verdict is Verdict.INDETERMINATE


def test_sa_learn_implies_no_sa_learn_randomized(rng):
    # d_ave to the mixture never exceeds the arithmetic mean of the
    # non-shared d_ave values (Jensen), so the SA learn condition is
    # strictly stronger than the no-SA one
    for _ in range(60):
        K = int(rng.integers(2, 5))
        H = int(rng.integers(3, 5))
        hyp = HypothesisSet(H, true_index=0, tx_index=int(rng.integers(1, H)))
        models = [random_discrete(rng, H) for _ in range(K)]
        net = random_network(rng, K)
        profile = divergence_profile(hyp, models, net)
        mean_non_tx = float(profile.d_ave[hyp.non_tx].mean())
        assert profile.d_mix_ave <= mean_non_tx + 1e-9
        if classify_regime_sa(profile, net, None).verdict is Verdict.LEARN:
            assert classify_regime_no_sa(profile).verdict is Verdict.LEARN


def test_indistinguishable_set():
    model = DiscreteLikelihood(np.array([[0.5, 0.5], [0.5, 0.5], [0.2, 0.8]]))
    assert indistinguishable_set(model, 0) == [0, 1]


def test_assumption_3_positive_and_negative():
    good = [GaussianLikelihood(np.array([0.0, 0.5, 5.0]))]
    ok, witness = check_assumption_3(good, 0)
    assert ok and witness == 0
    blind = [DiscreteLikelihood(np.array([[0.5, 0.5]] * 3))]
    ok, witness = check_assumption_3(blind, 0)
    assert not ok and witness is None


def test_assumption_4_gaussian_analytic():
    model = GaussianLikelihood(np.array([0.0, 0.5, 5.0]))
    ok, c = check_assumption_4(model, 0)
    assert ok and c == np.inf


def test_assumption_4_discrete_exact_tv():
    # truth distinguishable from both alternatives; TV to the closest
    # mixture is a hand-computable LP optimum
    model = DiscreteLikelihood(np.array([[0.5, 0.5], [0.2, 0.8], [0.8, 0.2]]))
    ok, c = check_assumption_4(model, 0)
    # alpha=0.5 reproduces (0.5, 0.5) exactly, so the minimum TV is 0
    assert not ok
    assert c == pytest.approx(0.0, abs=1e-9)
    model2 = DiscreteLikelihood(np.array([[0.5, 0.5], [0.2, 0.8], [0.3, 0.7]]))
    ok2, c2 = check_assumption_4(model2, 0)
    # best mixture is the closest vertex (0.3, 0.7): TV = 0.2
    assert ok2
    assert c2 == pytest.approx(0.2, abs=1e-9)


def test_assumption_4_no_distinguishable_hypotheses():
    model = DiscreteLikelihood(np.array([[0.5, 0.5], [0.5, 0.5]]))
    ok, c = check_assumption_4(model, 0)
    assert not ok and c == 0.0


def test_likelihood_bound_B():
    models = [DiscreteLikelihood(np.array([[0.5, 0.3, 0.2], [0.2, 0.3, 0.5], [0.3, 0.4, 0.3]]))]
    # shared hypothesis 3 excluded: bound over rows 1 and 2
    expect = np.log(0.5 / 0.2)
    assert likelihood_bound_B(models, 2) == pytest.approx(expect, abs=1e-15)
    assert likelihood_bound_B([GaussianLikelihood(np.array([0.0, 1.0]))], 0) is None


def test_bound_B_dominates_ratios_randomized(rng):
    for _ in range(100):
        model = random_discrete(rng, 4)
        tx = int(rng.integers(0, 4))
        bound = likelihood_bound_B([model], tx)
        keep = [t for t in range(4) if t != tx]
        logs = model.log_pmf[keep]
        assert np.abs(logs[:, None, :] - logs[None, :, :]).max() <= bound + 1e-15
