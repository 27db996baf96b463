from fractions import Fraction
from math import log, sqrt

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coverlab.core import Hypothesis, HypothesisClass, InputError, LabelSpace
from coverlab.distributions import (Distribution, DistributionFamily, JointDistribution, LabeledSample,
                                    MaliciousOracle, WorstLabel, covariate_shift_family, derive_seed,
                                    empirical_risk, opt_risk, risk, sample, tv_hdh, unlabeled)
from coverlab.losses import Loss


def test_point_mass_sample():
    assert list(sample(Distribution.point_mass(5, 2), 3, seed=1)) == [2, 2, 2]


def test_sampling_is_deterministic_per_seed():
    D = JointDistribution.from_labeling(Distribution.uniform(6), Hypothesis((0, 0, 1, 1, 0, 1)), Fraction(1, 5))
    a, b = D.draw(50, 9), D.draw(50, 9)
    assert np.array_equal(a.points, b.points) and np.array_equal(a.labels, b.labels)
    assert not np.array_equal(D.draw(50, 10).points, a.points)


def test_uniform_sampling_frequencies():
    n = 100_000
    counts = np.bincount(sample(Distribution.uniform(4), n, seed=3), minlength=4) / n
    # two-sided Hoeffding at failure mass 1e-6 over four cells
    assert sqrt(log(2 * 4 / 1e-6) / (2 * n)) < 0.01
    assert np.all(np.abs(counts - 0.25) <= 0.01)


def test_derive_seed_streams_differ():
    assert len({derive_seed(5, i) for i in range(100)}) == 100
    assert derive_seed(5, 3) == derive_seed(5, 3)


def test_risk_examples():
    h = Hypothesis((0, 1, 1, 0))
    D = JointDistribution.from_labeling(Distribution.uniform(4), h)
    L = Loss.zero_one(2)
    assert risk(h, D, L) == 0
    flipped = Hypothesis((0, 1, 1, 1))
    D2 = JointDistribution.from_labeling(Distribution.uniform(4), flipped)
    assert risk(h, D2, L) == Fraction(1, 4)
    assert risk(h, D2, L.scaled(3)) == 3 * risk(h, D2, L)


def test_opt_risk_two_members():
    H = HypothesisClass.explicit([(0, 0, 0, 0, 0, 0, 0, 0, 0, 0), (1, 1, 1, 1, 0, 0, 0, 0, 0, 0)])
    f = Hypothesis((1, 1, 1, 0, 0, 0, 0, 0, 0, 0))
    D = JointDistribution.from_labeling(Distribution.uniform(10), f)
    value, best = opt_risk(H, D, Loss.zero_one(2))
    assert risk(H[0], D, Loss.zero_one(2)) == Fraction(3, 10)
    assert (value, best) == (Fraction(1, 10), [1])


def test_opt_risk_realizable():
    H = HypothesisClass.thresholds(6)
    D = JointDistribution.from_labeling(Distribution.uniform(6), H[3])
    value, best = opt_risk(H, D, Loss.zero_one(2))
    assert value == 0 and 3 in best


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=5, max_size=5))
def test_ternary_optimum_at_most_one(f):
    # a member copying the second bits of f pays at most 1 per point
    H = HypothesisClass.first_bit_zero(5)
    D = JointDistribution.from_labeling(Distribution.uniform(5), Hypothesis(tuple(f)), labels=LabelSpace.pairs())
    assert opt_risk(H, D, Loss.ternary(3))[0] <= 1


def test_empirical_risk_examples():
    h = Hypothesis((0, 1, 1, 0))
    L = Loss.zero_one(2)
    assert empirical_risk(h, LabeledSample.from_pairs([(0, 0), (1, 1), (2, 1)]), L) == 0
    assert empirical_risk(h, LabeledSample.from_pairs([(0, 0), (1, 1), (2, 1), (3, 1)]), L) == 0.25
    assert empirical_risk(h, LabeledSample.from_pairs([(0, 0), (1, 1), (2, 1), (3, 1), (3, 1)]), L) == 0.4


def test_covariate_shift_examples():
    H = HypothesisClass.thresholds(4)
    D = Distribution.uniform(4)
    assert covariate_shift_family(D, H, 0, [D]).contains(D)
    # thresholds at 1 and 2 differ exactly on point 1
    D2 = Distribution([Fraction(1, 4), Fraction(3, 20), Fraction(7, 20), Fraction(1, 4)])
    assert tv_hdh(D, D2, H) == Fraction(1, 10)
    assert covariate_shift_family(D, H, Fraction(1, 5), [D2]).contains(D2)
    assert not covariate_shift_family(D, H, Fraction(19, 100), [D2]).contains(D2)
    single = HypothesisClass.explicit([(0, 1, 0, 1)])
    assert covariate_shift_family(D, single, 0, [D2]).contains(D2)


def test_malicious_oracle_corruption_rate():
    base = JointDistribution.from_labeling(Distribution.uniform(8), Hypothesis((0,) * 4 + (1,) * 4))
    clean = MaliciousOracle(base, 0.0)
    assert np.array_equal(clean.draw(30, 4).points, base.draw(30, 4).points)
    n = 20_000
    S, flags = MaliciousOracle(base, 0.2).draw_flagged(n, 11)
    assert abs(flags.mean() - 0.2) <= sqrt(log(2 / 1e-6) / (2 * n))
    with pytest.raises(InputError):
        MaliciousOracle(base, 1.0)


def test_worst_label_targets_best_member():
    H = HypothesisClass.thresholds(4)
    base = JointDistribution.from_labeling(Distribution.uniform(4), H[2])
    adv = WorstLabel(base, H, Loss.zero_one(2))
    x, y = adv(0, 0)
    assert H[2](x) != y


def test_joint_serialization_round_trip():
    D = JointDistribution.from_labeling(Distribution([1, 2, 3]), Hypothesis((0, 1, 1)), Fraction(1, 3))
    text = D.dumps()
    lines = [ln.split(",") for ln in text.splitlines()]
    assert sum(Fraction(int(n), int(d)) for _, _, n, d in lines) == 1
    assert Distribution.loads(Distribution([1, 2, 3]).dumps()) == Distribution([1, 2, 3])


def test_family_membership():
    fam = DistributionFamily.k_sets(4, 2)
    assert len(fam) == 6
    assert fam.contains(Distribution.uniform_on(4, [1, 3]))
    assert not fam.contains(Distribution.uniform(4))
    with pytest.raises(InputError):
        JointDistribution.from_labeling(Distribution.uniform(4), Hypothesis((0, 0, 0, 0)),
                                        family=DistributionFamily.singleton(Distribution.point_mass(4, 0)))


def test_unlabeled_strips_labels():
    D = JointDistribution.from_labeling(Distribution.uniform(5), Hypothesis((0, 1, 0, 1, 0)))
    assert np.array_equal(unlabeled(D, 12, 2), D.draw(12, 2).points)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=4, max_size=4).filter(any),
       st.lists(st.integers(0, 1), min_size=4, max_size=4))
def test_exact_and_float_risk_agree(weights, labels):
    D = JointDistribution.from_labeling(Distribution(weights), Hypothesis(tuple(labels)), Fraction(1, 7))
    h = Hypothesis((0, 1, 1, 0))
    Df = JointDistribution([[float(v) for v in row] for row in D.table])
    assert abs(float(risk(h, D, Loss.zero_one(2))) - risk(h, Df, Loss.zero_one(2))) < 1e-12
