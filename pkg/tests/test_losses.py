import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from coverlab.core import STAR, Hypothesis, InputError, LabelSpace
from coverlab.distributions import Distribution, JointDistribution, risk
from coverlab.losses import (FairnessMetric, Loss, PerturbationMap, PreconditionError, TagError,
                             eta_ell, fairness_violation, is_fair, partial_risk, robust_risk,
                             robust_support, verify_tags)


def brute_c(table):
    """Smallest c with L(a, y) <= c (L(a, z) + L(z, y)) for all triples; None if unbounded."""
    k = len(table)
    best = Fraction(0)
    for a, z, y in itertools.product(range(k), repeat=3):
        if table[a][y] == 0:
            continue
        den = table[a][z] + table[z][y]
        if den == 0:
            return None
        best = max(best, Fraction(table[a][y]) / den)
    return best


def test_zero_one_tags():
    t = verify_tags(Loss.zero_one(3))
    assert t.identity and t.bounds == (1, 1) and t.c == 1


def test_ternary_constant_is_three():
    t = verify_tags(Loss.ternary(3))
    assert t.c == 3 and not t.identity and t.bounds is None
    with pytest.raises(TagError):
        verify_tags(Loss.ternary(3), c=2)
    with pytest.raises(TagError):
        verify_tags(Loss.ternary(3), identity=True)


def test_squared_loss_on_half_grid_is_two_approximate():
    L = Loss.from_payloads(LabelSpace.grid([0, 0.5, 1]), "squared")
    t = verify_tags(L)
    assert t.c == 2
    assert t.witness_c == (0, 1, 2)


def test_bounds_claim_checked():
    L = Loss.bounded(2, 1, 4)
    assert verify_tags(L, bounds=(1, 4)).bounds == (1, 4)
    with pytest.raises(TagError):
        verify_tags(L, bounds=(1, 3))


def test_eta_ell_examples():
    assert eta_ell(Loss.zero_one(2)) == Fraction(1, 2)
    L = Loss(((0, 1, 4), (1, 0, 1), (4, 1, 0)))
    assert eta_ell(L) == Fraction(1, 8)
    assert eta_ell(L.scaled(10)) == eta_ell(L)
    with pytest.raises(PreconditionError):
        eta_ell(Loss.ternary(3))


def test_loss_validation():
    with pytest.raises(InputError):
        Loss(((1, 0), (0, 0)))
    with pytest.raises(InputError):
        Loss(((0, -1), (1, 0)))


def test_loss_csv_round_trip():
    L = Loss.bounded(3, 1, 4)
    assert Loss.from_csv(L.to_csv()).table == L.table


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4).flatmap(lambda k: st.lists(st.integers(0, 5), min_size=k * k - k, max_size=k * k - k)
                                 .map(lambda off, k=k: (k, off))))
def test_minimal_constant_matches_triple_scan(data):
    k, off = data
    it = iter(off)
    table = tuple(tuple(0 if a == y else next(it) for y in range(k)) for a in range(k))
    t = verify_tags(Loss(table))
    expect = brute_c(table)
    if expect is None:
        assert t.c is None
    else:
        assert t.c == max(expect, 1 if any(off) else 0)


def _line_setup():
    h = Hypothesis((0, 0, 1, 1))
    D = JointDistribution.from_labeling(Distribution.uniform(4), h)
    return h, D, PerturbationMap.line(4, 1), Loss.zero_one(2)


def test_robust_risk_on_line_graph():
    h, D, U, L = _line_setup()
    # brute force: worst neighbor loss at each point, weighted by the point's mass
    expect = sum(Fraction(1, 4) * max(L(h(z), h(x)) for z in U(x)) for x in range(4))
    assert robust_risk(h, D, U, L) == expect == Fraction(1, 2)
    assert robust_support(h, U, L) == (0, 3)


def test_identity_perturbation_gives_ordinary_risk():
    h = Hypothesis((0, 1, 1, 0))
    D = JointDistribution.from_labeling(Distribution.uniform(4), Hypothesis((0, 1, 0, 0)), Fraction(1, 5))
    I = PerturbationMap.identity(4)
    assert robust_risk(h, D, I, Loss.zero_one(2)) == risk(h, D, Loss.zero_one(2))
    assert robust_support(h, I, Loss.zero_one(2)) == (0, 1, 2, 3)


def test_constant_hypothesis_is_robust():
    h = Hypothesis((1, 1, 1, 1))
    D = JointDistribution.from_labeling(Distribution.uniform(4), h)
    U = PerturbationMap.line(4, 2)
    assert robust_risk(h, D, U, Loss.zero_one(2)) == 0
    assert robust_support(h, U, Loss.zero_one(2)) == (0, 1, 2, 3)


def test_perturbation_adjacency_round_trip():
    U = PerturbationMap.line(5, 2)
    assert PerturbationMap.from_adjacency(U.to_adjacency()) == U


def test_partial_risk_examples():
    target = Hypothesis((0, 1, 1, 0))
    D = JointDistribution.from_labeling(Distribution.uniform(4), target)
    assert partial_risk(target, D) == 0
    assert partial_risk(Hypothesis((STAR,) * 4), D) == 1
    assert partial_risk(Hypothesis((0, 1, 1, STAR)), D) == Fraction(1, 4)


def test_fairness_violation_examples():
    labels = LabelSpace.grid([0, 1])
    metric = FairnessMetric.constant(2, 0.0, alpha=0.1, gamma=0.5)
    D = Distribution.uniform(2)
    assert fairness_violation(Hypothesis((0, 1)), D, metric, labels) == Fraction(1, 2)
    assert fairness_violation(Hypothesis((1, 1)), D, metric, labels) == 0
    assert fairness_violation(Hypothesis((0, 1)), D, metric, labels, gamma=1.0) == 0
    assert not is_fair(Hypothesis((0, 1)), D, metric, labels)


def test_fairness_metric_must_be_symmetric():
    with pytest.raises(InputError):
        FairnessMetric(((0, 1), (2, 0)), 0.1, 0.1)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=5, max_size=5), st.floats(0, 1))
def test_fairness_violation_decreases_in_gamma(pay, g):
    labels = LabelSpace.grid([0, 0.25, 0.5, 0.75, 1])
    metric = FairnessMetric.line(5, 0.1, 0.0, 0.0)
    D = Distribution.uniform(5)
    h = Hypothesis(tuple(pay))
    assert fairness_violation(h, D, metric, labels, g) >= fairness_violation(h, D, metric, labels, g + 0.2)
    assert fairness_violation(h, D, metric, labels, 1.0) == 0
