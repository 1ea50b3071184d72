"""Supervised multi-interval discretization with the MDL stopping rule.

Cut points are chosen recursively: at each step the boundary cut with the
lowest weighted class entropy is tried, and kept only if its information
gain beats the minimum-description-length cost of encoding the split.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .dataset import NOMINAL, Dataset, Feature, format_number
from .errors import DataError


_TIE = 1e-12


def _entropy_rows(counts: np.ndarray) -> np.ndarray:
    counts = np.asarray(counts, dtype=np.float64)
    totals = counts.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = counts / totals
        terms = np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return -terms.sum(axis=-1) + 0.0


def entropy(counts) -> float:
    """Shannon entropy in bits of a class-count vector (``0 log 0 = 0``)."""
    counts = np.asarray(counts, dtype=np.float64)
    if counts.ndim != 1 or (counts < 0).any():
        raise ValueError("counts must be a non-negative vector")
    if counts.sum() == 0:
        raise ValueError("entropy of an all-zero count vector is undefined")
    return float(_entropy_rows(counts[None, :])[0])


def mdl_threshold(n: int, ent: float, k: int, ent1: float, k1: int,
                  ent2: float, k2: int) -> float:
    """Minimum gain a cut must exceed to be accepted on a set of ``n`` values."""
    delta = math.log2(3 ** k - 2) - (k * ent - k1 * ent1 - k2 * ent2)
    return math.log2(n - 1) / n + delta / n


def _midpoint(a: float, b: float) -> float:
    mid = a + (b - a) / 2.0
    return a if mid >= b else mid


def fit_cut_points(values, labels) -> list[float]:
    """Fit MDLP cut points for one numeric feature.

    Parameters
    ----------
    values : array-like of float
        Observed values; missing values must already be removed.
    labels : array-like
        Class label per value (any hashable labels).

    Returns
    -------
    list of float
        Strictly increasing accepted cuts, possibly empty.
    """
    values = np.asarray(values, dtype=np.float64)
    labels = np.asarray(labels)
    if len(values) != len(labels):
        raise ValueError("values and labels differ in length")
    if len(values) == 0:
        return []
    _, codes = np.unique(labels, return_inverse=True)
    n_classes = int(codes.max()) + 1
    order = np.argsort(values, kind="stable")
    v = values[order]
    c = codes[order]

    # Per distinct value: class counts.
    starts = np.flatnonzero(np.r_[True, v[1:] != v[:-1]])
    distinct = v[starts]
    group = np.cumsum(np.r_[False, v[1:] != v[:-1]])
    counts = np.zeros((len(distinct), n_classes), dtype=np.int64)
    np.add.at(counts, (group, c), 1)

    cuts: list[float] = []
    _split(distinct, counts, 0, len(distinct), cuts)
    return sorted(cuts)


def _split(distinct, counts, lo, hi, cuts):
    # Work on distinct-value groups [lo, hi).
    if hi - lo < 2:
        return
    block = counts[lo:hi]
    left = np.cumsum(block, axis=0)[:-1]
    total = left[-1] + block[-1]
    right = total - left

    # Boundary candidates: skip pairs of groups that are pure in the same class.
    nz = block > 0
    pure = nz.sum(axis=1) == 1
    cls = nz.argmax(axis=1)
    same_pure = pure[:-1] & pure[1:] & (cls[:-1] == cls[1:])
    cand = np.flatnonzero(~same_pure)
    if len(cand) == 0:
        return

    n = int(total.sum())
    n1 = left[cand].sum(axis=1)
    n2 = n - n1
    e1 = _entropy_rows(left[cand])
    e2 = _entropy_rows(right[cand])
    weighted = (n1 * e1 + n2 * e2) / n
    # leftmost of the (numerically) tied minima
    best = int(np.flatnonzero(weighted <= weighted.min() + _TIE)[0])
    j = int(cand[best])

    ent = float(_entropy_rows(total[None, :])[0])
    gain = ent - float(weighted[best])
    bound = mdl_threshold(n, ent, int((total > 0).sum()),
                          float(e1[best]), int((left[j] > 0).sum()),
                          float(e2[best]), int((right[j] > 0).sum()))
    if not gain > bound:
        return
    cuts.append(_midpoint(float(distinct[lo + j]), float(distinct[lo + j + 1])))
    _split(distinct, counts, lo, lo + j + 1, cuts)
    _split(distinct, counts, lo + j + 1, hi, cuts)


def bin_labels(cuts) -> tuple[str, ...]:
    if len(cuts) == 0:
        return ("all",)
    edges = ["-inf", *(format_number(x) for x in cuts), "+inf"]
    labels = [f"({edges[i]},{edges[i + 1]}]" for i in range(len(edges) - 2)]
    labels.append(f"({edges[-2]},+inf)")
    return tuple(labels)


def assign_bins(cuts, values) -> np.ndarray:
    """Bin index per value (``-1`` for missing); bin i holds ``(c_i, c_{i+1}]``."""
    values = np.asarray(values, dtype=np.float64)
    idx = np.searchsorted(np.asarray(cuts, dtype=np.float64), values, side="left")
    return np.where(np.isnan(values), -1, idx).astype(np.int64)


@dataclass(frozen=True)
class CutPointModel:
    """Sorted cuts per numeric feature, keyed by feature name."""

    cuts: Mapping[str, tuple[float, ...]]

    def labels(self, name: str) -> tuple[str, ...]:
        return bin_labels(self.cuts[name])


def fit_discretizer(d: Dataset) -> CutPointModel:
    cuts = {}
    for f, col in zip(d.schema.features, d.columns):
        if not f.is_numeric:
            continue
        ok = ~np.isnan(col)
        cuts[f.name] = tuple(fit_cut_points(col[ok], d.y[ok]))
    return CutPointModel(cuts)


def discretized_feature(f: Feature, m: CutPointModel) -> Feature:
    if not f.is_numeric:
        return f
    if f.name not in m.cuts:
        raise DataError(f"cut-point model has no entry for numeric feature {f.name!r}")
    return Feature(f.name, NOMINAL, f.group, m.labels(f.name))


def apply_discretization(d: Dataset, m: CutPointModel) -> Dataset:
    """Replace every numeric feature by its ordered bins; nominal ones pass through."""
    feats, cols = [], []
    for f, col in zip(d.schema.features, d.columns):
        feats.append(discretized_feature(f, m))
        cols.append(assign_bins(m.cuts[f.name], col) if f.is_numeric else col)
    return Dataset(d.schema.replace_features(feats), tuple(cols), d.y)
