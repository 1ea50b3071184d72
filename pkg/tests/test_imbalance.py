import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import make_dataset
from credscore.dataset import class_counts
from credscore.errors import DataError, ModelError
from credscore.imbalance import (CostMatrix, Threshold, bad_class_f1, candidate_thresholds,
                                 classify, cost_threshold, predict, select_threshold_f1, smote)
from credscore.synth import SynthSpec, generate


def test_f1_threshold_hand_example():
    t = select_threshold_f1([0.9, 0.8, 0.4, 0.3], [1, 1, 1, 0])
    assert t.t == pytest.approx(0.35)
    assert bad_class_f1([0.9, 0.8, 0.4, 0.3], [1, 1, 1, 0], t.t) == 1.0


def test_f1_threshold_identical_scores():
    t = select_threshold_f1([0.5] * 4, [1, 0, 1, 0])
    assert t.t == 1.0
    assert predict([0.5] * 4, t).tolist() == [0, 0, 0, 0]


def test_f1_threshold_inverted_scores():
    scores, labels = [0.1, 0.2, 0.8, 0.9], [1, 1, 0, 0]
    t = select_threshold_f1(scores, labels)
    assert predict(scores, t)[:2].tolist() == [0, 0]     # both goods called bad


def test_f1_threshold_single_class():
    with pytest.raises(ModelError):
        select_threshold_f1([0.2, 0.3], [1, 1])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 20).map(lambda k: k / 20), st.integers(0, 1)),
                min_size=2, max_size=40))
def test_f1_threshold_matches_scan(pairs):
    scores = [s for s, _ in pairs]
    labels = [y for _, y in pairs]
    if len(set(labels)) < 2:
        return
    want_t, want_f = oracles.bad_f1_scan(scores, labels)
    got = select_threshold_f1(scores, labels)
    assert got.t == want_t
    assert bad_class_f1(scores, labels, got.t) == pytest.approx(float(want_f), abs=1e-15)


def test_candidates_include_ends_and_midpoints():
    assert candidate_thresholds([0.2, 0.6, 0.6]).tolist() == pytest.approx([0, 0.4, 1])


@pytest.mark.parametrize("x, t", [(1, 0.5), (2, 0.6667), (50, 0.9804)])
def test_cost_threshold(x, t):
    got = cost_threshold(CostMatrix(x))
    assert got.t == pytest.approx(t, abs=1e-4)
    assert got.provenance == "cost_ratio"


@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_cost_threshold_increasing(a, b):
    if a < b:
        assert cost_threshold(a).t < cost_threshold(b).t


def test_cost_matrix_validation():
    with pytest.raises(ModelError):
        CostMatrix(0)
    with pytest.raises(ModelError):
        CostMatrix(2, fn_cost=3)
    with pytest.raises(ModelError):
        Threshold(1.5)


@pytest.mark.parametrize("score, t, label", [(0.6, 0.5, "good"), (0.5, 0.5, "bad"),
                                             (0.95, 50 / 51, "bad")])
def test_classify(score, t, label):
    assert classify(score, t) == label


# -- SMOTE ----------------------------------------------------------------------

@pytest.fixture(scope="module")
def full_scale():
    return generate(SynthSpec(seed=2, missing_rate=0.02))


def test_smote_zero_is_identity(full_scale):
    assert smote(full_scale, 0) is full_scale


def test_smote_doubles_minority(full_scale):
    out = smote(full_scale, 100, seed=1)
    assert class_counts(out) == (7401, 242)


def test_smote_keeps_originals(full_scale):
    out = smote(full_scale, 200, seed=1)
    n = len(full_scale)
    assert out.subset(np.arange(n)) == full_scale
    assert np.all(out.y[n:] == 0)


def test_smote_interpolates_within_parents():
    d = make_dataset({"a": [0.0, 1.0, 2.0, 10.0, 11.0, 12.0] + [5.0] * 8,
                      "c": ["X", "Y", "X", "Y", "X", "Y"] + ["X"] * 8}, "b" * 6 + "g" * 8)
    out = smote(d, 300, k=2, seed=4)
    assert class_counts(out) == (8, 24)
    new = out.column("a")[len(d):]
    bads = np.sort(d.column("a")[d.y == 0])
    # every synthetic value lies between its base and one of the base's two neighbours
    assert np.all((new >= bads.min()) & (new <= bads.max()))
    assert not np.any((new > 2.0) & (new < 10.0))
    assert set(out.column("c")[len(d):].tolist()) <= {0, 1}


def test_smote_deterministic(full_scale):
    assert smote(full_scale, 100, seed=7) == smote(full_scale, 100, seed=7)


def test_smote_bad_percent(full_scale):
    with pytest.raises(DataError):
        smote(full_scale, 150)
    with pytest.raises(DataError):
        smote(full_scale, -100)
