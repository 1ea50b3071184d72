"""Decision thresholds for imbalanced classes, and SMOTE oversampling.

The decision rule everywhere is: classify good iff ``score > t``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, class_counts
from .errors import DataError, ModelError
from .seeding import derive_rng

DEFAULT_HALF = "default_half"
F1_OPTIMIZED = "f1_optimized"
COST_RATIO = "cost_ratio"


@dataclass(frozen=True)
class Threshold:
    t: float
    provenance: str = DEFAULT_HALF

    def __post_init__(self):
        if not 0.0 <= self.t <= 1.0:
            raise ModelError(f"threshold {self.t} outside [0, 1]")


@dataclass(frozen=True)
class CostMatrix:
    """Misclassification costs: a rejected good costs 1, an accepted bad costs ``x``."""

    fp_cost: float
    fn_cost: float = 1.0

    def __post_init__(self):
        if not self.fp_cost > 0:
            raise ModelError("cost ratio must be positive")
        if self.fn_cost != 1.0:
            raise ModelError("the cost of a rejected good is fixed at 1")


def cost_threshold(c: CostMatrix | float) -> Threshold:
    """Minimum-expected-cost threshold ``x / (1 + x)``."""
    x = c.fp_cost if isinstance(c, CostMatrix) else CostMatrix(float(c)).fp_cost
    return Threshold(x / (1.0 + x), COST_RATIO)


def classify(score: float, t: Threshold | float) -> str:
    t = t.t if isinstance(t, Threshold) else t
    return "good" if score > t else "bad"


def predict(scores, t: Threshold | float) -> np.ndarray:
    """Vectorised :func:`classify`: 1 = good, 0 = bad."""
    t = t.t if isinstance(t, Threshold) else t
    return (np.asarray(scores, dtype=np.float64) > t).astype(np.int64)


def candidate_thresholds(scores) -> np.ndarray:
    """0, 1 and the midpoints between adjacent distinct sorted scores."""
    u = np.unique(np.asarray(scores, dtype=np.float64))
    mids = u[:-1] + (u[1:] - u[:-1]) / 2.0
    return np.unique(np.concatenate([[0.0], mids, [1.0]]))


def bad_class_f1(scores, labels, t: float) -> float:
    """F1 of the bad class when bad is predicted for ``score <= t``."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    pred_bad = scores <= t
    tp = int(np.sum(pred_bad & (labels == 0)))
    return 2.0 * tp / (int(pred_bad.sum()) + int(np.sum(labels == 0)))


def select_threshold_f1(scores, labels) -> Threshold:
    """Threshold maximising bad-class F1; ties go to the larger threshold.

    Parameters
    ----------
    scores : array-like of float
        Estimated P(good) per instance.
    labels : array-like of int
        1 = good, 0 = bad.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    n_bad = int(np.sum(labels == 0))
    if n_bad == 0 or n_bad == len(labels):
        raise ModelError("threshold selection needs both classes")
    cands = candidate_thresholds(scores)
    order = np.argsort(scores, kind="stable")
    s_sorted = scores[order]
    bad_cum = np.concatenate([[0], np.cumsum(labels[order] == 0)])
    n_pred_bad = np.searchsorted(s_sorted, cands, side="right")
    tp = bad_cum[n_pred_bad]
    f1 = 2.0 * tp / (n_pred_bad + n_bad)
    best = np.flatnonzero(f1 == f1.max())[-1]
    return Threshold(float(cands[best]), F1_OPTIMIZED)


# -- SMOTE --------------------------------------------------------------------

def smote(d: Dataset, percent: int, k: int = 5, seed: int = 0) -> Dataset:
    """Append synthetic minority instances by interpolating towards minority neighbours.

    See :func:`smote_pairs`, which also reports each synthetic row's parents.
    """
    return smote_pairs(d, percent, k, seed)[0]


def smote_pairs(d: Dataset, percent: int, k: int = 5, seed: int = 0
                ) -> tuple[Dataset, np.ndarray, np.ndarray]:
    """SMOTE oversampling, returning ``(dataset, base_rows, neighbour_rows)``.

    Synthetic row ``len(d) + i`` was built from original rows
    ``base_rows[i]`` and ``neighbour_rows[i]``.

    Each minority instance spawns ``percent // 100`` synthetics. For each, one
    of its ``k`` nearest minority neighbours (Euclidean over min-max scaled
    numerics) is drawn, every numeric is placed uniformly at random on the
    segment between the two parents, and each nominal takes the majority
    value of the pair, which for a pair of disagreeing values is the base's.
    """
    if percent < 0 or percent % 100:
        raise DataError("SMOTE percent must be a non-negative multiple of 100")
    if percent == 0:
        return d, np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    n_good, n_bad = class_counts(d)
    minority = 0 if n_bad <= n_good else 1
    idx = np.flatnonzero(d.y == minority)
    if len(idx) <= k:
        raise DataError(f"minority class has {len(idx)} instances; need more than k={k}")

    feats = d.schema.features
    num_cols = [j for j, f in enumerate(feats) if f.is_numeric]
    if num_cols:
        all_num = np.column_stack([d.columns[j] for j in num_cols])
        lo = np.min(np.where(np.isnan(all_num), np.inf, all_num), axis=0)
        hi = np.max(np.where(np.isnan(all_num), -np.inf, all_num), axis=0)
        lo = np.where(np.isfinite(lo), lo, 0.0)
        span = np.where(hi - lo > 0, hi - lo, 1.0)
        Z = (all_num[idx] - lo) / span
        # missing numerics sit at the minority mean so they add no distance
        known = ~np.isnan(Z)
        means = np.where(known.any(axis=0),
                         np.where(known, Z, 0.0).sum(axis=0) / np.maximum(known.sum(axis=0), 1),
                         0.0)
        Z = np.where(known, Z, means)
    else:
        Z = np.column_stack([d.columns[j][idx] for j in range(len(feats))]).astype(float)

    diff = Z[:, None, :] - Z[None, :, :]
    if num_cols:
        dist = np.sum(diff * diff, axis=2)
    else:
        dist = np.sum(diff != 0, axis=2).astype(float)
    np.fill_diagonal(dist, np.inf)
    neighbours = np.argsort(dist, axis=1, kind="stable")[:, :k]

    rng = derive_rng(seed, "smote")
    reps = percent // 100
    base_pos = np.repeat(np.arange(len(idx)), reps)
    nb_pos = neighbours[base_pos, rng.integers(0, k, len(base_pos))]
    gaps = rng.random((len(base_pos), len(num_cols)))

    new_cols = []
    gap_col = {j: c for c, j in enumerate(num_cols)}
    for j, (f, col) in enumerate(zip(feats, d.columns)):
        base = col[idx[base_pos]]
        nb = col[idx[nb_pos]]
        if f.is_numeric:
            synth = base + gaps[:, gap_col[j]] * (nb - base)
            synth = np.clip(synth, np.minimum(base, nb), np.maximum(base, nb))
            synth = np.where(np.isnan(nb), base, synth)
        else:
            synth = base.copy()
        new_cols.append(np.concatenate([col, synth]))
    y = np.concatenate([d.y, np.full(len(base_pos), minority, dtype=np.int64)])
    return Dataset(d.schema, tuple(new_cols), y), idx[base_pos], idx[nb_pos]
