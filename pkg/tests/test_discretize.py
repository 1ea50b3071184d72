import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import make_dataset
from credscore.discretize import (CutPointModel, apply_discretization, assign_bins, bin_labels,
                                  entropy, fit_cut_points, fit_discretizer, mdl_threshold)


@pytest.mark.parametrize("counts, expected", [((5, 0), 0.0), ((5, 5), 1.0), ((3, 1), 0.8113)])
def test_entropy(counts, expected):
    assert entropy(counts) == pytest.approx(expected, abs=1e-4)


def test_entropy_all_zero():
    with pytest.raises(ValueError):
        entropy([0, 0])


def test_pure_halves_cut():
    assert fit_cut_points([1, 2, 3, 4], list("bbgg")) == [2.5]


def test_alternating_no_cut():
    assert fit_cut_points([1, 2, 3, 4], list("gbgb")) == []


def test_alternating_bound_exceeds_gain():
    # best cut (after value 1) has gain 0.311; bound is about 1.057
    ent = 1.0
    e2 = entropy([1, 2])
    gain = ent - 0.75 * e2
    bound = mdl_threshold(4, ent, 2, 0.0, 1, e2, 2)
    assert gain == pytest.approx(0.3113, abs=1e-4)
    assert bound > gain


def test_single_class_no_cut():
    assert fit_cut_points([5, 1, 3, 9], list("gggg")) == []


def test_empty_input():
    assert fit_cut_points([], []) == []


def test_three_clean_intervals():
    values = list(range(60))
    labels = ["b"] * 20 + ["g"] * 20 + ["b"] * 20
    assert fit_cut_points(values, labels) == [19.5, 39.5]


def test_small_blocks_fail_the_mdl_bound():
    # same shape at 10 per block: gain 0.2516 against a bound of 0.261
    labels = ["b"] * 10 + ["g"] * 10 + ["b"] * 10
    assert fit_cut_points(list(range(30)), labels) == []


def test_bins_boundary_inclusion():
    assert bin_labels([2.5]) == ("(-inf,2.5]", "(2.5,+inf)")
    assert assign_bins([2.5], np.array([2.5, 2.6])).tolist() == [0, 1]


def test_no_cuts_single_bin():
    assert bin_labels([]) == ("all",)
    assert assign_bins([], np.array([-1e9, 0.0, 1e9])).tolist() == [0, 0, 0]


def test_interval_membership():
    labels = bin_labels([10, 20])
    assert labels[assign_bins([10, 20], np.array([15.0]))[0]] == "(10,20]"


def test_missing_gets_minus_one():
    assert assign_bins([1.0], np.array([np.nan, 0.0])).tolist() == [-1, 0]


def test_all_missing_feature_single_bin():
    d = make_dataset({"x": [None, None, None, None]}, "ggbb")
    m = fit_discretizer(d)
    assert m.cuts["x"] == ()
    assert apply_discretization(d, m).column("x").tolist() == [-1, -1, -1, -1]


def test_apply_keeps_nominals_and_discretizes_numerics():
    d = make_dataset({"x": [1, 2, 3, 4], "c": ["A", "B", "A", "B"]}, "bbgg")
    out = apply_discretization(d, fit_discretizer(d))
    assert out.schema.feature("x").categories == ("(-inf,2.5]", "(2.5,+inf)")
    assert out.column("x").tolist() == [0, 0, 1, 1]
    assert out.column("c").tolist() == d.column("c").tolist()


def test_unseen_values_fall_in_end_bins():
    m = CutPointModel({"x": (2.5,)})
    d = make_dataset({"x": [-100, 100]}, "gb")
    assert apply_discretization(d, m).column("x").tolist() == [0, 1]


def _random_sets(n_sets, seed):
    rng = np.random.default_rng(seed)
    for _ in range(n_sets):
        n = int(rng.integers(1, 31))
        values = rng.integers(0, int(rng.integers(2, 12)), n).astype(float)
        shift = rng.normal(0, 1)
        p = 1 / (1 + np.exp(-(values - values.mean()) * shift))
        labels = (rng.random(n) < p).astype(int)
        if rng.random() < 0.3:
            labels = rng.integers(0, 3, n)      # three classes now and then
        yield values.tolist(), labels.tolist()


def test_matches_oracle_on_random_sets():
    for values, labels in _random_sets(300, seed=42):
        assert fit_cut_points(values, labels) == oracles.mdlp(values, labels), (values, labels)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 8), st.integers(0, 1)), min_size=1, max_size=30))
def test_matches_oracle_property(pairs):
    values = [float(v) for v, _ in pairs]
    labels = [c for _, c in pairs]
    assert fit_cut_points(values, labels) == oracles.mdlp(values, labels)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(-50, 50, allow_nan=False), st.integers(0, 1)),
                min_size=2, max_size=40))
def test_cuts_are_boundary_points(pairs):
    values = np.array([v for v, _ in pairs])
    labels = np.array([c for _, c in pairs])
    cuts = fit_cut_points(values, labels)
    assert cuts == sorted(set(cuts))
    distinct = np.unique(values)
    for c in cuts:
        i = np.searchsorted(distinct, c)
        assert 0 < i < len(distinct)
        lo, hi = distinct[i - 1], distinct[i]
        assert lo < c < hi or (c == lo and math.nextafter(lo, math.inf) == hi)
        left = set(labels[values == lo].tolist())
        right = set(labels[values == hi].tolist())
        assert not (len(left) == 1 and left == right)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(-1e3, 1e3, allow_nan=False), st.booleans()),
                min_size=1, max_size=40))
def test_training_values_stay_in_range(pairs):
    values = np.array([v for v, _ in pairs])
    cuts = fit_cut_points(values, [g for _, g in pairs])
    bins = assign_bins(cuts, values)
    assert bins.min() >= 0 and bins.max() <= len(cuts)
