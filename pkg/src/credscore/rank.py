"""Filter feature ranking and the leakage-free filtered pipeline.

A pipeline fit discretizes, ranks, selects the top features, fits the
classifier and picks a decision threshold, all from the training data it is
handed and nothing else.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .classifiers import ClassifierSpec, Design, fit_classifier, score
from .dataset import Dataset, Instance, Schema, class_counts, encode_instance, stratified_folds
from .discretize import (CutPointModel, _entropy_rows, apply_discretization, assign_bins,
                         discretized_feature, fit_discretizer)
from .errors import DataError, ModelError
from .imbalance import DEFAULT_HALF, Threshold, cost_threshold, select_threshold_f1
from .seeding import derive_seed

METRICS = ("chi2", "infogain")
INNER_FOLDS = 3


def contingency(d: Dataset, feature: str, missing_as_bin: bool = False) -> np.ndarray:
    """Bin x class count table, shape ``(n_bins, 2)`` with columns ``[bad, good]``."""
    f = d.schema.feature(feature)
    if f.is_numeric:
        raise DataError(f"feature {feature!r} is numeric; discretize first")
    col = d.column(feature)
    n_bins = len(f.categories)
    if missing_as_bin:
        col = np.where(col < 0, n_bins, col)
        n_bins += 1
    known = col >= 0
    tab = np.bincount(col[known] * 2 + d.y[known], minlength=2 * n_bins)
    return tab.reshape(n_bins, 2)


def chi_squared_table(tab) -> float:
    tab = np.asarray(tab, dtype=np.float64)
    n = tab.sum()
    if n == 0:
        return 0.0
    expected = np.outer(tab.sum(axis=1), tab.sum(axis=0)) / n
    ok = expected > 0
    return float(np.sum((tab[ok] - expected[ok]) ** 2 / expected[ok]))


def info_gain_table(tab) -> float:
    tab = np.asarray(tab, dtype=np.float64)
    n = tab.sum()
    if n == 0:
        return 0.0
    rows = tab.sum(axis=1)
    used = rows > 0
    h_class = float(_entropy_rows(tab.sum(axis=0)[None, :])[0])
    h_cond = float(np.sum(rows[used] / n * _entropy_rows(tab[used])))
    return max(h_class - h_cond, 0.0)


def chi_squared(d: Dataset, feature: str, missing_as_bin: bool = False) -> float:
    """Pearson chi-squared of a nominal feature against the class (no Yates correction)."""
    return chi_squared_table(contingency(d, feature, missing_as_bin))


def info_gain(d: Dataset, feature: str, missing_as_bin: bool = False) -> float:
    """Class entropy minus expected class entropy within the feature's bins, in bits."""
    return info_gain_table(contingency(d, feature, missing_as_bin))


@dataclass(frozen=True)
class FeatureRanking:
    metric: str
    rows: tuple[tuple[str, float], ...]

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.rows]

    def top(self, k: int) -> list[str]:
        return self.names[:k]


def rank_features(d: Dataset, metric: str = "chi2",
                  missing_as_bin: bool = False) -> FeatureRanking:
    """Rank every feature by descending statistic; ties keep schema order."""
    if metric not in METRICS:
        raise DataError(f"unknown ranking metric {metric!r}")
    stat = chi_squared if metric == "chi2" else info_gain
    values = [(f.name, stat(d, f.name, missing_as_bin)) for f in d.schema.features]
    order = sorted(range(len(values)), key=lambda i: -values[i][1])
    return FeatureRanking(metric, tuple(values[i] for i in order))


# -- pipeline -----------------------------------------------------------------

def parse_threshold_mode(mode: str) -> str:
    """Normalise ``half``, ``f1`` or ``cost:X``."""
    if mode in ("half", "f1"):
        return mode
    if mode.startswith("cost:"):
        try:
            x = float(mode[5:])
        except ValueError:
            raise ModelError(f"bad cost ratio in threshold mode {mode!r}") from None
        if not x > 0:
            raise ModelError("cost ratio must be positive")
        return mode
    raise ModelError(f"unknown threshold mode {mode!r}; expected half, f1 or cost:X")


@dataclass(frozen=True)
class PipelineSpec:
    classifier: ClassifierSpec = field(default_factory=ClassifierSpec)
    n_features: int | None = None     # None keeps every feature
    metric: str = "chi2"
    threshold: str = "f1"

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ModelError(f"unknown ranking metric {self.metric!r}")
        parse_threshold_mode(self.threshold)
        if self.n_features is not None and self.n_features < 1:
            raise ModelError("n_features must be at least 1")


@dataclass(frozen=True, eq=False)
class FittedPipeline:
    schema: Schema                    # input schema the pipeline was fitted on
    cuts: CutPointModel
    selected: tuple[str, ...]         # in schema order
    spec: PipelineSpec
    model: object
    threshold: Threshold
    seed: int = 0
    ranking: FeatureRanking | None = None
    dataset_fingerprint: str = ""
    n_train: tuple[int, int] = (0, 0)


@dataclass(frozen=True, eq=False)
class PreparedTrain:
    """Discretization and ranking of one training set, reusable across feature counts."""

    train: Dataset
    cuts: CutPointModel
    discretized: Dataset
    ranking: FeatureRanking


def prepare(train: Dataset, metric: str = "chi2") -> PreparedTrain:
    cuts = fit_discretizer(train)
    disc = apply_discretization(train, cuts)
    return PreparedTrain(train, cuts, disc, rank_features(disc, metric))


def build_design(raw: Dataset, discretized: Dataset, names: Sequence[str]) -> Design:
    idx = [raw.schema.index(n) for n in names]
    n = len(raw)
    codes = np.empty((n, len(idx)), dtype=np.int64)
    values = np.empty((n, len(idx)), dtype=np.float64)
    for out, j in enumerate(idx):
        codes[:, out] = discretized.columns[j]
        col = raw.columns[j]
        values[:, out] = col if raw.schema.features[j].is_numeric else np.where(col < 0, np.nan, col)
    n_bins = tuple(len(discretized.schema.features[j].categories) for j in idx)
    numeric = tuple(raw.schema.features[j].is_numeric for j in idx)
    return Design(codes, n_bins, values, numeric)


def fit_pipeline(train: Dataset, spec: PipelineSpec, seed: int = 0, jobs: int = 1,
                 prepared: PreparedTrain | None = None) -> FittedPipeline:
    """Fit cuts, ranking, selection, classifier and threshold on ``train`` only."""
    n_good, n_bad = class_counts(train)
    if n_good == 0 or n_bad == 0:
        raise ModelError("training data must contain both classes")
    if prepared is None or prepared.ranking.metric != spec.metric:
        prepared = prepare(train, spec.metric)
    m = len(train.schema.features)
    k = m if spec.n_features is None else spec.n_features
    if not 1 <= k <= m:
        raise ModelError(f"n_features={k} outside [1, {m}]")
    chosen = set(prepared.ranking.top(k))
    selected = tuple(n for n in train.schema.names if n in chosen)
    design = build_design(train, prepared.discretized, selected)
    model = fit_classifier(spec.classifier, design, train.y,
                           seed=derive_seed(seed, "classifier"), jobs=jobs)

    mode = spec.threshold
    if mode == "half":
        threshold = Threshold(0.5, DEFAULT_HALF)
    elif mode.startswith("cost:"):
        threshold = cost_threshold(float(mode[5:]))
    else:
        threshold = _inner_f1_threshold(train, spec, seed, jobs)

    return FittedPipeline(train.schema, prepared.cuts, selected, spec, model, threshold,
                          seed, prepared.ranking, train.fingerprint(), (n_good, n_bad))


def _inner_f1_threshold(train: Dataset, spec: PipelineSpec, seed: int, jobs: int) -> Threshold:
    """F1 threshold from out-of-fold scores of an internal stratified split."""
    folds = stratified_folds(train, INNER_FOLDS, derive_seed(seed, "threshold-folds"))
    inner_spec = replace(spec, threshold="half")
    oof = np.empty(len(train))
    for i in range(INNER_FOLDS):
        tr, te = folds.train_test(i)
        inner = fit_pipeline(train.subset(tr), inner_spec, derive_seed(seed, "threshold-fit", i),
                             jobs)
        oof[te] = score_dataset(inner, train.subset(te))
    return select_threshold_f1(oof, train.y)


def _align(p: FittedPipeline, d: Dataset) -> Dataset:
    try:
        d = d.select(p.schema.names) if d.schema.names != p.schema.names else d
    except DataError as e:
        raise DataError(f"data does not match the pipeline schema: {e}") from None
    if d.schema.features != p.schema.features:
        raise DataError("data feature definitions differ from the pipeline schema")
    return d


def pipeline_design(p: FittedPipeline, d: Dataset) -> Design:
    d = _align(p, d).select(p.selected)
    cols = []
    for f, col in zip(d.schema.features, d.columns):
        cols.append(assign_bins(p.cuts.cuts[f.name], col) if f.is_numeric else col)
    disc = Dataset(d.schema.replace_features(discretized_feature(f, p.cuts)
                                             for f in d.schema.features), tuple(cols), d.y)
    return build_design(d, disc, p.selected)


def score_dataset(p: FittedPipeline, d: Dataset) -> np.ndarray:
    """P(good) for every instance of ``d``."""
    return score(p.model, pipeline_design(p, d))


def pipeline_score(p: FittedPipeline, inst: Instance) -> float:
    cols = encode_instance(p.schema, inst)
    d = Dataset(p.schema, tuple(cols), np.ones(1, dtype=np.int64))
    return float(score_dataset(p, d)[0])


def predict_dataset(p: FittedPipeline, d: Dataset) -> np.ndarray:
    return (score_dataset(p, d) > p.threshold.t).astype(np.int64)
