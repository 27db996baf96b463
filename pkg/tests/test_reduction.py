import itertools
from fractions import Fraction
from math import comb, exp, log, sqrt

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import brute_growth
from coverlab.core import HypothesisClass, InputError, ResourceError
from coverlab.distributions import Distribution, JointDistribution, LabeledSample, derive_seed, risk
from coverlab.harness.experiments import band_thresholds, fair_ramps
from coverlab.learners import consistent_erm_learner, discretize, robust_erm_learner, sq_learner
from coverlab.losses import FairnessMetric, Loss, PerturbationMap, PreconditionError, partial_risk, robust_risk
from coverlab.reduction import (ReductionConfig, agnostic_reduce, covariate_shift_reduce,
                                doubly_bounded_reduce, dp_max_log_ratio, exponential_mechanism,
                                fair_reduce, labeled_sample_size, learning_to_cover, malicious_reduce,
                                mechanism_probabilities, partial_decomposition, partial_reduce,
                                robust_decomposition, robust_reduce, semiprivate_reduce, stable_sizes,
                                subsample_cover)
from coverlab.reduction.cover import cost_tables
from coverlab.reduction.private import shift_robust_learner
from coverlab.reduction.sq import HonestOracle, response_grid, sq_cover, sq_reduce

SLACK = lambda n: sqrt(log(1e4) / (2 * n))  # noqa: E731


def noisy_thresholds(n, t, noise):
    H = HypothesisClass.thresholds(n)
    return H, JointDistribution.from_labeling(Distribution.uniform(n), H[t], noise)


# covers


def test_empty_unlabeled_sample_gives_unconditioned_output(thresholds10):
    A = consistent_erm_learner(thresholds10)
    cover = learning_to_cover(A, thresholds10, [])
    assert cover.members == (A([], []),)


def test_cover_size_bounded_by_growth(thresholds10):
    A = consistent_erm_learner(thresholds10)
    cover = learning_to_cover(A, thresholds10, [1, 4, 6, 8])
    assert brute_growth(thresholds10.members, 4) == 5
    assert len(cover) <= 5


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 9), max_size=8))
def test_cover_realizes_every_restriction(pts):
    H = HypothesisClass.thresholds(10)
    cover = learning_to_cover(consistent_erm_learner(H), H, pts)
    idx = sorted(set(pts))
    wanted = {tuple(h.labels[i] for i in idx) for h in H}
    got = {tuple(h.labels[i] for i in idx) for h in cover}
    assert wanted == got
    assert list(cover.members) == sorted(set(cover.members))


def test_subset_enumeration_counts(thresholds10):
    A = consistent_erm_learner(thresholds10)
    assert subsample_cover(A, thresholds10, [0, 1, 3, 5, 7, 9], mode="all").subsets == 2 ** 6
    fixed = subsample_cover(A, thresholds10, [0, 1, 2, 3, 5, 6, 7, 9], keep_fraction=0.75)
    assert fixed.subsets == comb(8, 6) == 28
    with pytest.raises(ResourceError):
        subsample_cover(A, thresholds10, list(range(10)) * 3, keep_fraction=0.5, budget=1000)


def test_keep_everything_matches_plain_cover(thresholds10):
    A = consistent_erm_learner(thresholds10)
    S = [2, 2, 5, 8]
    assert subsample_cover(A, thresholds10, S, keep_fraction=1.0).members == \
        learning_to_cover(A, thresholds10, S).members


def test_labeled_sample_size_formula():
    assert labeled_sample_size(5, 0.1, 0.1) == int(np.ceil(2 * log(100) / 0.01))
    assert labeled_sample_size(5, 0.1, 0.1, bound=3) == int(np.ceil(18 * log(100) / 0.01 - 1e-9))


# agnostic and discretized paths


def test_singleton_class_always_returned():
    H = HypothesisClass.explicit([(0, 1, 1, 0)])
    D = JointDistribution.from_labeling(Distribution.uniform(4), H[0], Fraction(1, 4))
    for s in range(5):
        assert agnostic_reduce(consistent_erm_learner(H), H, D, D, ReductionConfig(0.2, 0.1), s).hypothesis == H[0]


def test_agnostic_noisy_thresholds():
    H, D = noisy_thresholds(20, 7, Fraction(1, 10))
    L = Loss.zero_one(2)
    assert opt_of(H, D, L) == Fraction(1, 10)
    A = consistent_erm_learner(H)
    cfg = ReductionConfig(0.15, 0.1)
    trials = 200
    wins = sum(float(risk(agnostic_reduce(A, H, D, D, cfg, derive_seed(5, t)).hypothesis, D, L)) <= 0.25 + 1e-12
               for t in range(trials))
    assert wins / trials >= 0.9 - SLACK(trials)


def opt_of(H, D, L):
    return min(risk(h, D, L) for h in H)


def test_uniform_bounded_loss_shrinks_eps_by_four():
    H = HypothesisClass.thresholds(6)
    D = JointDistribution.from_labeling(Distribution.uniform(6), H[2])
    d = discretize(H, Loss.bounded(2, 3, 3), 0.5)
    res = doubly_bounded_reduce(d, D, D, ReductionConfig(0.2, 0.1, m_U=12), 1)
    assert res.info["eps_prime"] == pytest.approx(0.05)


def test_doubly_bounded_zero_one_matches_agnostic():
    H, D = noisy_thresholds(10, 4, Fraction(1, 10))
    L = Loss.zero_one(2)
    d = discretize(H, L, 0.5)
    cfg = ReductionConfig(0.2, 0.1, m_U=15)
    for s in range(10):
        a = agnostic_reduce(consistent_erm_learner(H), H, D, D, cfg, s)
        b = doubly_bounded_reduce(d, D, D, cfg, s)
        assert (a.hypothesis, a.m_L, a.cover.members) == (b.hypothesis, b.m_L, b.cover.members)


def test_doubly_bounded_rejects_zero_off_diagonal():
    H = HypothesisClass.first_bit_zero(3)
    d = discretize(H, Loss.ternary(3), 0.5)
    D = JointDistribution.from_labeling(Distribution.uniform(3), H[0], labels=H.labels)
    with pytest.raises(PreconditionError):
        doubly_bounded_reduce(d, D, D, ReductionConfig(0.2, 0.1, m_U=4))


# malicious noise


def test_malicious_parameters():
    cfg = ReductionConfig(0.2, 0.1, eta=0.1)
    assert cfg.eta_prime == pytest.approx(0.1375)
    assert cfg.Delta == pytest.approx(0.2 / 1.2 - 0.1)
    H = HypothesisClass.thresholds(4)
    D = JointDistribution.from_labeling(Distribution.uniform(4), H[1])
    for bad in (ReductionConfig(0.2, 0.1, eta=0.2 / 1.2), ReductionConfig(0.5, 0.1, eta=0.1)):
        with pytest.raises(PreconditionError):
            malicious_reduce(consistent_erm_learner(H), H, D, bad)


def test_malicious_without_noise_recovers_target():
    H = HypothesisClass.thresholds(6)
    D = JointDistribution.from_labeling(Distribution.uniform(6), H[3])
    res = malicious_reduce(consistent_erm_learner(H), H, D, ReductionConfig(0.2, 0.1, m_U=8), 3)
    assert res.cover.subsets == comb(8, int(np.floor((1 - res.info["eta_prime"]) * 8)))
    assert risk(res.hypothesis, D, Loss.zero_one(2)) <= 0.2


# robust and partial


def test_robust_identity_matches_agnostic():
    H, D = noisy_thresholds(10, 5, Fraction(1, 10))
    L = Loss.zero_one(2)
    I = PerturbationMap.identity(10)
    cfg = ReductionConfig(0.2, 0.1, m_U=30)
    for s in range(8):
        a = agnostic_reduce(consistent_erm_learner(H), H, D, D, cfg, s, L)
        b = robust_reduce(robust_erm_learner(H, I, L), H, D, D, I, cfg, s, L)
        assert (a.hypothesis, a.index, a.m_L) == (b.hypothesis, b.index, b.m_L)


def test_robust_decomposition_exact():
    H, D = noisy_thresholds(10, 5, Fraction(1, 10))
    L = Loss.zero_one(2)
    U = PerturbationMap.line(10, 1)
    opt, mu, inner, best = robust_decomposition(H, D, U, L)
    assert opt == min(robust_risk(h, D, U, L) for h in H)
    assert opt == mu + (1 - mu) * inner


def test_partial_total_class_matches_agnostic():
    H, D = noisy_thresholds(10, 5, Fraction(1, 10))
    cfg = ReductionConfig(0.2, 0.1, m_U=30)
    A = consistent_erm_learner(H)
    for s in range(8):
        assert partial_reduce(A, H, D, D, cfg, s).hypothesis == agnostic_reduce(A, H, D, D, cfg, s).hypothesis


def test_partial_band_class_realizable():
    B = band_thresholds(10, 2)
    marg = Distribution([1, 1, 1, 0, 0, 1, 1, 1, 1, 1])
    D = JointDistribution.from_labeling(marg, HypothesisClass.thresholds(10)[5])
    opt, mu, inner, _ = partial_decomposition(B, D)
    assert opt == 0 and opt == mu + (1 - mu) * inner
    A = consistent_erm_learner(B)
    trials = 60
    wins = sum(partial_risk(partial_reduce(A, B, D, D, ReductionConfig(0.2, 0.1), s).hypothesis, D) <= 0.2
               for s in range(trials))
    assert wins / trials >= 0.9 - SLACK(trials)


# private selection


def test_mechanism_probabilities():
    assert mechanism_probabilities(np.array([3, 3]), 1.0) == pytest.approx([0.5, 0.5])
    # scores (0, -2) are costs (0, 2)
    assert mechanism_probabilities(np.array([0, 2]), 1.0)[0] == pytest.approx(1 / (1 + exp(-1)), abs=1e-12)
    p = mechanism_probabilities(np.array([4, 1, 1, 9]), 1e6)
    assert p[1] + p[2] >= 1 - 1e-6
    with pytest.raises(InputError):
        mechanism_probabilities(np.array([]), 1.0)


def test_exact_privacy_ratio_small_instance():
    H = HypothesisClass.thresholds(4)
    cover = learning_to_cover(consistent_erm_learner(H), H, [0, 1, 2, 3])
    tables = cost_tables(cover, Loss.zero_one(2).array)
    S = LabeledSample(np.array([0, 1, 2, 3, 1]), np.array([0, 1, 1, 1, 0]))
    for alpha in (0.3, 1.0, 2.5):
        worst, _ = dp_max_log_ratio(tables, S, alpha)
        assert worst <= alpha + 1e-9


def test_mechanism_draw_is_seeded():
    H = HypothesisClass.thresholds(4)
    cover = learning_to_cover(consistent_erm_learner(H), H, [0, 1, 2, 3])
    S = LabeledSample(np.array([0, 2]), np.array([0, 1]))
    assert exponential_mechanism(cover, S, 1.0, 4)[1] == exponential_mechanism(cover, S, 1.0, 4)[1]


def test_stability_sizes():
    A = consistent_erm_learner(HypothesisClass.thresholds(10))
    n, pool = stable_sizes(A, ReductionConfig(0.2, 0.1, alpha=1.0))
    assert n == A.n(0.1, 0.05) and pool == 2 * n
    with pytest.raises(InputError):
        stable_sizes(A, ReductionConfig(0.2, 0.1, alpha=2.0))


def test_covariate_shift_without_shift_matches_semiprivate():
    H, D = noisy_thresholds(12, 4, Fraction(1, 10))
    A = shift_robust_learner(H)
    cfg = ReductionConfig(0.2, 0.1, alpha=2.0, m_U=20, m_L=100)
    for s in range(5):
        a = covariate_shift_reduce(A, H, D.marginal, D, cfg, s)
        b = semiprivate_reduce(A, H, D.marginal, D, cfg, s)
        assert (a.hypothesis, a.index) == (b.hypothesis, b.index)


def test_covariate_shift_rejects_far_target():
    H, D = noisy_thresholds(4, 2, 0)
    far = D.with_marginal(Distribution([Fraction(1, 4), Fraction(1, 8), Fraction(3, 8), Fraction(1, 4)]))
    with pytest.raises(PreconditionError) as info:
        covariate_shift_reduce(shift_robust_learner(H), H, D.marginal, far, ReductionConfig(0.2, 0.1))
    assert info.value.value == Fraction(1, 8)


# statistical queries


def test_response_grid():
    assert response_grid(0.5) == [-1.0, 0.0, 1.0]
    assert len(response_grid(0.2)) == 6
    assert len(response_grid(0.1)) == 11
    g = response_grid(0.3)
    assert g[-1] == pytest.approx(0.8) and all(min(abs(v - c) for c in g) <= 0.3 + 1e-12 for v in np.linspace(-1, 1, 201))


def test_sq_single_member():
    H = HypothesisClass.explicit([(1, 0, 1)])
    cover, combos = sq_cover(sq_learner(H, 0.5))
    assert combos == 3 and cover == (H[0],)


def test_sq_parity_pairs_honest():
    X = HypothesisClass.explicit([(0, 0, 0, 0), (0, 1, 0, 1), (0, 0, 1, 1), (0, 1, 1, 0)])
    L = Loss.zero_one(2)
    learner = sq_learner(X, 0.1)
    for t, noise in itertools.product(range(4), (0, Fraction(1, 10))):
        D = JointDistribution.from_labeling(Distribution.uniform(4), X[t], noise)
        res = sq_reduce(learner, HonestOracle(D), loss=L, n_points=4)
        assert res.combinations == 11 ** 4
        opt = min(float(risk(h, D, L)) for h in X)
        assert float(risk(res.hypothesis, D, L)) <= opt + learner.eps + learner.tau + 1e-12


# fairness


def test_fair_unconstrained_matches_agnostic():
    H = fair_ramps(6)
    L = Loss.from_payloads(H.labels, "absolute")
    D = JointDistribution.from_labeling(Distribution.uniform(6), H[3], Fraction(1, 10), labels=H.labels)
    metric = FairnessMetric.constant(6, 10.0, 0.0, 0.0)
    cfg = ReductionConfig(0.2, 0.1, m_U=10, m_L=200)
    A = consistent_erm_learner(H, L)
    for s in range(5):
        a = agnostic_reduce(A, H, D, D, cfg, s, L)
        b = fair_reduce(H, D.marginal, D, metric, cfg, s, A=A)
        assert (a.hypothesis, a.index) == (b.hypothesis, b.index)
