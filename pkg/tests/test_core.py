import numpy as np
import pytest
from fractions import Fraction
from hypothesis import given, settings, strategies as st

from coverlab.core import (STAR, Hypothesis, HypothesisClass, InputError, LabelSpace, ResourceError,
                           classification_distance, growth_function, restrict, restriction_table,
                           vc_dimension)
from coverlab.distributions import Distribution

from conftest import brute_growth


def test_restrict_thresholds_on_two_points():
    H = HypothesisClass.thresholds(5)
    assert len(H) == 6
    assert set(restrict(H, [1, 3])) == {(1, 1), (0, 1), (0, 0)}


def test_restrict_empty_sample_gives_one_empty_labeling():
    H = HypothesisClass.intervals(4)
    assert set(restrict(H, [])) == {()}
    rows, first = restriction_table(H, [])
    assert rows.shape == (1, 0) and list(first) == [0]


def test_singleton_class_has_one_restriction():
    H = HypothesisClass.explicit([(0, 1, 1, 0)])
    assert len(restrict(H, [0, 1, 2, 2])) == 1


def test_restriction_table_first_producers_in_member_order(thresholds10):
    rows, first = restriction_table(thresholds10, [2, 7])
    assert list(first) == sorted(first)
    for r, i in zip(rows, first):
        assert tuple(thresholds10.members[i, [2, 7]]) == tuple(r)


def test_sample_outside_space_rejected(thresholds10):
    with pytest.raises(InputError):
        restrict(thresholds10, [10])


def test_growth_thresholds_and_trivial_cases(thresholds10):
    assert growth_function(thresholds10, 4) == 5
    assert growth_function(thresholds10, 4, closed_form=False) == 5
    assert growth_function(thresholds10, 0) == 1
    full = HypothesisClass.explicit([(0, 0), (0, 1), (1, 0), (1, 1)])
    assert growth_function(full, 2) == 4


@pytest.mark.parametrize("H", [
    HypothesisClass.thresholds(7),
    HypothesisClass.intervals(6),
    HypothesisClass.finite_support_indicators(6, 2),
    HypothesisClass.k_set_indicators(6, 2),
    HypothesisClass.first_bit_zero(4),
])
def test_closed_forms_match_brute_force(H):
    for n in range(H.n_points + 1):
        assert growth_function(H, n) == brute_growth(H.members, n), (H.family, n)


def test_growth_budget_error():
    H = HypothesisClass.explicit(np.eye(12, dtype=int))
    with pytest.raises(ResourceError):
        growth_function(H, 6, budget=10)


def test_vc_dimensions():
    assert vc_dimension(HypothesisClass.thresholds(8)) == 1
    assert vc_dimension(HypothesisClass.intervals(8)) == 2
    # the all-ones member adds the one missing labeling on 4 points
    assert vc_dimension(HypothesisClass.finite_support_indicators(6, 3)) == 4


def test_classification_distance_examples():
    D = Distribution.uniform(4)
    h = Hypothesis((1, 1, 0, 0))
    g = Hypothesis((1, 1, 1, 0))
    assert classification_distance(h, h, D) == 0
    assert classification_distance(h, g, D) == Fraction(1, 4)
    assert classification_distance(h, Hypothesis((0, 1, 0, 0)), Distribution.point_mass(4, 0)) == 1


def test_partial_distance_rejected():
    with pytest.raises(InputError):
        classification_distance(Hypothesis((STAR, 1)), Hypothesis((0, 1)), Distribution.uniform(2))


def test_class_round_trips_through_text():
    H = HypothesisClass.explicit([(0, STAR, 1), (1, 1, 0)])
    again = HypothesisClass.loads(H.dumps())
    assert np.array_equal(again.members, H.members)
    fam = HypothesisClass.loads(HypothesisClass.intervals(5).dumps())
    assert np.array_equal(fam.members, HypothesisClass.intervals(5).members)


def test_duplicate_rows_removed_and_bad_labels_rejected():
    H = HypothesisClass.explicit([(0, 1), (0, 1), (1, 1)])
    assert len(H) == 2
    with pytest.raises(InputError):
        HypothesisClass(np.array([[0, 2]]), LabelSpace.binary())


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(0, 1), min_size=5, max_size=5), min_size=1, max_size=12),
       st.integers(0, 5))
def test_growth_is_bounded_and_monotone(rows, n):
    H = HypothesisClass.explicit(rows)
    g = growth_function(H, n)
    assert g == brute_growth(H.members, n)
    assert g <= min(len(H), 2 ** n)
    if n > 0:
        assert growth_function(H, n - 1) <= g


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(0, 2), min_size=4, max_size=4), min_size=1, max_size=10),
       st.lists(st.integers(0, 3), max_size=6))
def test_restrictions_partition_the_members(rows, sample):
    H = HypothesisClass.explicit(rows)
    groups = restrict(H, sample)
    assert sorted(i for g in groups.values() for i in g) == list(range(len(H)))
    assert len(groups) <= growth_function(H, len(sample))
