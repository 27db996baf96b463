import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coverlab.core import Hypothesis, HypothesisClass, InputError, LabelSpace
from coverlab.distributions import Distribution, JointDistribution, derive_seed, risk
from coverlab.learners import (DiscretizationError, InconsistentSampleError, benedek_itai_learner,
                               consistent_erm_learner, constant_learner, discretize, erm_learner,
                               sq_learner)
from coverlab.losses import Loss
from coverlab.reduction.sq import AdversarialOracle, HonestOracle


def consistent_indices(H, pairs):
    return [i for i, h in enumerate(H) if all(h(x) == y for x, y in pairs)]


def test_empty_sample_gives_first_member():
    H = HypothesisClass.thresholds(10)
    assert consistent_erm_learner(H)([], []) == H[0]


def test_threshold_samples():
    H = HypothesisClass.thresholds(10)
    A = consistent_erm_learner(H)
    # 1{x >= t}: positive at 2 and negative at 7 is impossible
    assert consistent_indices(H, [(2, 1), (7, 0)]) == []
    with pytest.raises(InconsistentSampleError):
        A([2, 7], [1, 0])
    h = A([2, 7], [0, 1])
    assert h == H[consistent_indices(H, [(2, 0), (7, 1)])[0]]
    assert h.labels == (0, 0, 0, 1, 1, 1, 1, 1, 1, 1)


def test_sample_pinning_unique_member():
    H = HypothesisClass.thresholds(5)
    assert consistent_erm_learner(H)([2, 3], [0, 1]) == H[3]


def test_declared_complexity():
    A = consistent_erm_learner(HypothesisClass.thresholds(10))
    assert A.n(0.1, 0.1) == int(np.ceil((np.log(11) + np.log(10)) / 0.1))
    assert A.n(0.2, 0.1) <= A.n(0.1, 0.1) and A.n(0.1, 0.2) <= A.n(0.1, 0.1)
    with pytest.raises(InputError):
        A.n(0.0, 0.1)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10), st.lists(st.integers(0, 9), min_size=1, max_size=12), st.randoms())
def test_consistent_erm_is_order_invariant(t, pts, rnd):
    H = HypothesisClass.thresholds(10)
    ys = [H[t](x) for x in pts]
    A = consistent_erm_learner(H)
    order = list(range(len(pts)))
    rnd.shuffle(order)
    h = A(pts, ys)
    assert h == A([pts[i] for i in order], [ys[i] for i in order])
    assert H.index(h) == consistent_indices(H, list(zip(pts, ys)))[0]


def test_erm_and_constant_learners():
    H = HypothesisClass.thresholds(4)
    A = erm_learner(H, Loss.zero_one(2))
    pts, ys = [0, 1, 2, 3], [0, 0, 1, 0]
    errors = [sum(h(x) != y for x, y in zip(pts, ys)) for h in H]
    assert A(pts, ys) == H[errors.index(min(errors))]
    assert constant_learner(H, 2)([0], [1]) == H[2]


def test_benedek_itai_rule():
    A = benedek_itai_learner(6)
    assert A([3], [1]) == Hypothesis((1,) * 6)
    assert A([3], [0]) == Hypothesis((0,) * 6)
    assert A([], []) == Hypothesis((0,) * 6)
    assert A.n(0.01, 0.01) == max(1, int(np.ceil(np.log(100))))


def test_declared_complexity_holds_empirically():
    H = HypothesisClass.thresholds(20)
    A = consistent_erm_learner(H)
    eps, delta, trials = 0.1, 0.1, 500
    n = A.n(eps, delta)
    fails = 0
    for t in range(trials):
        target = H[int(np.random.default_rng(t).integers(len(H)))]
        D = JointDistribution.from_labeling(Distribution.uniform(20), target)
        S = D.draw(n, derive_seed(3, t))
        fails += risk(A.fit(S), D, Loss.zero_one(2)) > eps
    slack = np.sqrt(np.log(1e4) / (2 * trials))
    assert fails / trials <= delta + slack


def grid_class(values, n_points=2):
    labels = LabelSpace.grid(values)
    rows = list(itertools.product(range(len(values)), repeat=n_points))
    return HypothesisClass.explicit(rows, labels)


def test_discretize_collapses_when_eps_exceeds_diameter():
    H = grid_class([0, 0.25, 0.5], n_points=2)
    d = discretize(H, Loss.from_payloads(H.labels, "absolute"), 0.6)
    assert len(d.coarse) == 1


def test_discretize_zero_one_is_identity():
    H = HypothesisClass.thresholds(6)
    d = discretize(H, Loss.zero_one(2), 0.5)
    assert np.array_equal(d.coarse.members, H.members)
    assert d.cover_map == tuple(range(len(H)))


def test_discretize_tenth_grid():
    values = [round(0.05 * i, 2) for i in range(21)]
    H = grid_class(values, n_points=2)
    loss = Loss.from_payloads(H.labels, "absolute")
    d = discretize(H, loss, 0.05, step=0.1)
    # exhaustive per-point check of both witness maps
    L = loss.array
    for i, j in enumerate(d.cover_map):
        assert (L[d.coarse.members[j], H.members[i]] <= 0.05 + 1e-12).all()
    for j, i in enumerate(d.useful_map):
        assert (L[d.coarse.members[j], H.members[i]] <= 0.05 + 1e-12).all()
    assert len(d.coarse) == 11 ** 2
    with pytest.raises(DiscretizationError):
        discretize(H, loss, 0.04, step=0.1)


def test_sq_learner_single_member():
    H = HypothesisClass.explicit([(0, 1, 0)])
    L = sq_learner(H, 0.1)
    D = JointDistribution.from_labeling(Distribution.uniform(3), H[0])
    oracle = HonestOracle(D)
    assert L.run(oracle) == H[0] and oracle.calls == 1 and L.n_queries == 1


def test_sq_learner_rejects_large_tolerance():
    with pytest.raises(InputError):
        sq_learner(HypothesisClass.thresholds(3), 0.1, eps=0.2)


@pytest.mark.parametrize("target", range(4))
def test_sq_learner_risk_under_honest_and_adversarial_oracles(target):
    H = HypothesisClass.thresholds(3)
    tau = 0.1
    L = sq_learner(H, tau, eps=0.25)
    D = JointDistribution.from_labeling(Distribution([1, 2, 3]), H[target])
    assert float(risk(L.run(HonestOracle(D)), D, Loss.zero_one(2))) <= 2 * tau
    for signs in itertools.product((-1, 1), repeat=len(H)):
        h = L.run(AdversarialOracle(D, signs))
        assert float(risk(h, D, Loss.zero_one(2))) <= 2 * tau + 1e-12
