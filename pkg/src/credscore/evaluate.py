"""Confusion-matrix metrics, ROC/AUC, cross-validation and the two sweep harnesses.

The positive class is *good*: a true positive is a good classified as good.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .classifiers import ClassifierSpec
from .dataset import Dataset, stratified_folds
from .errors import ModelError
from .imbalance import Threshold, cost_threshold, predict
from .rank import FittedPipeline, PipelineSpec, fit_pipeline, prepare, score_dataset
from .seeding import derive_seed


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def n_good(self) -> int:
        return self.tp + self.fn

    @property
    def n_bad(self) -> int:
        return self.tn + self.fp


def _code(label) -> int:
    if isinstance(label, str):
        if label not in ("good", "bad"):
            raise ValueError(f"unknown label {label!r}")
        return int(label == "good")
    return int(label)


def confusion(pairs) -> ConfusionMatrix:
    """Tally ``(predicted, actual)`` pairs; labels are ``good``/``bad`` or 1/0."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("confusion needs at least one pair")
    pred = np.array([_code(p) for p, _ in pairs])
    act = np.array([_code(a) for _, a in pairs])
    return confusion_arrays(pred, act)


def confusion_arrays(pred, actual) -> ConfusionMatrix:
    pred = np.asarray(pred, dtype=bool)
    actual = np.asarray(actual, dtype=bool)
    return ConfusionMatrix(tp=int(np.sum(pred & actual)), fp=int(np.sum(pred & ~actual)),
                           tn=int(np.sum(~pred & ~actual)), fn=int(np.sum(~pred & actual)))


def _ratio(a: int, b: int) -> float | None:
    return a / b if b > 0 else None


@dataclass(frozen=True)
class MetricSet:
    """Metrics from one confusion matrix; ``None`` marks an undefined value.

    Precision, recall and F1 refer to ``designated`` (``good`` or ``bad``).
    """

    accuracy: float | None
    tp_rate: float | None
    tn_rate: float | None
    fp_rate: float | None
    precision: float | None
    recall: float | None
    f1: float | None
    designated: str = "good"

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("accuracy", "tp_rate", "tn_rate", "fp_rate", "precision", "recall", "f1")}


def f1_score(p: float | None, r: float | None) -> float | None:
    if p is None or r is None or p + r == 0:
        return None
    return 2 * p * r / (p + r)


def metrics(m: ConfusionMatrix, designated: str = "good") -> MetricSet:
    if designated == "good":
        precision, recall = _ratio(m.tp, m.tp + m.fp), _ratio(m.tp, m.tp + m.fn)
    elif designated == "bad":
        precision, recall = _ratio(m.tn, m.tn + m.fn), _ratio(m.tn, m.tn + m.fp)
    else:
        raise ValueError("designated class must be 'good' or 'bad'")
    return MetricSet(
        accuracy=_ratio(m.tp + m.tn, m.n),
        tp_rate=_ratio(m.tp, m.tp + m.fn),
        tn_rate=_ratio(m.tn, m.tn + m.fp),
        fp_rate=_ratio(m.fp, m.tn + m.fp),
        precision=precision,
        recall=recall,
        f1=f1_score(precision, recall),
        designated=designated,
    )


# -- ROC ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RocCurve:
    """ROC points as integer counts, from (0, 0) to (n_bad, n_good).

    Point ``i`` is reached by calling good every instance scoring at least
    ``thresholds[i]`` (``inf`` for the origin).
    """

    fp: np.ndarray
    tp: np.ndarray
    thresholds: np.ndarray
    n_good: int
    n_bad: int

    @property
    def fp_rate(self) -> np.ndarray:
        return self.fp / self.n_bad

    @property
    def tp_rate(self) -> np.ndarray:
        return self.tp / self.n_good


def roc_curve(scores, labels) -> RocCurve:
    """Sweep the threshold down through the distinct scores.

    Tied scores move the curve in one diagonal step.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    n_good = int(labels.sum())
    n_bad = len(labels) - n_good
    if n_good == 0 or n_bad == 0:
        raise ModelError("ROC curve needs both classes")
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    lab = labels[order]
    last = np.r_[s[1:] != s[:-1], True]
    tp = np.cumsum(lab)[last]
    fp = np.cumsum(1 - lab)[last]
    return RocCurve(np.r_[0, fp], np.r_[0, tp], np.r_[np.inf, s[last]], n_good, n_bad)


def auc(c: RocCurve) -> float:
    """Trapezoidal area, summed exactly in integers before a single division."""
    dfp = np.diff(c.fp).astype(object)
    heights = (c.tp[1:] + c.tp[:-1]).astype(object)
    twice_area = int(np.sum(dfp * heights)) if len(dfp) else 0
    return twice_area / (2 * c.n_good * c.n_bad)


def auc_score(scores, labels) -> float:
    return auc(roc_curve(scores, labels))


# -- cross-validation ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FoldResult:
    fold: int
    confusion: ConfusionMatrix
    metrics: MetricSet
    auc: float
    threshold: Threshold


@dataclass(frozen=True, eq=False)
class CVResult:
    folds: tuple[FoldResult, ...]
    scores: np.ndarray          # out-of-fold P(good) per instance
    labels: np.ndarray
    fold_of: np.ndarray

    @property
    def mean_auc(self) -> float:
        return float(np.mean([f.auc for f in self.folds]))

    @property
    def pooled_curve(self) -> RocCurve:
        return roc_curve(self.scores, self.labels)

    @property
    def pooled_auc(self) -> float:
        return auc(self.pooled_curve)


def _map(fn, items, jobs):
    items = list(items)
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def cross_validate(d: Dataset, spec: PipelineSpec, k: int = 10, seed: int = 0,
                   jobs: int = 1) -> CVResult:
    """Stratified k-fold evaluation of the full pipeline; folds may run in parallel."""
    folds = stratified_folds(d, k, seed)

    def run(i):
        tr, te = folds.train_test(i)
        p = fit_pipeline(d.subset(tr), spec, derive_seed(seed, "cv-fit", i))
        s = score_dataset(p, d.subset(te))
        return te, s, p.threshold

    results = _map(run, range(k), jobs)
    scores = np.empty(len(d))
    fold_results = []
    for i, (te, s, thr) in enumerate(results):
        scores[te] = s
        cm = confusion_arrays(predict(s, thr), d.y[te])
        fold_results.append(FoldResult(i, cm, metrics(cm), auc_score(s, d.y[te]), thr))
    return CVResult(tuple(fold_results), scores, d.y, folds.assignment)


@dataclass(frozen=True)
class FeatureSweepRow:
    n_features: int
    auc: tuple[tuple[str, float], ...]    # (classifier label, mean fold AUC)


def classifier_labels(specs: Sequence[ClassifierSpec]) -> list[str]:
    labels, seen = [], {}
    for s in specs:
        seen[s.kind] = seen.get(s.kind, 0) + 1
        labels.append(s.kind if seen[s.kind] == 1 else f"{s.kind}#{seen[s.kind]}")
    return labels


def feature_sweep(d: Dataset, specs: Sequence[ClassifierSpec], metric: str = "chi2",
                  k: int = 10, seed: int = 0, jobs: int = 1) -> list[FeatureSweepRow]:
    """Mean fold AUC per classifier as features are dropped one by one, m down to 1.

    Ranking is refitted inside every training fold. Thresholds do not affect
    AUC, so the default 0.5 rule is used throughout.
    """
    m = len(d.schema.features)
    folds = stratified_folds(d, k, seed)
    labels = classifier_labels(specs)
    prepared = _map(lambda i: prepare(d.subset(folds.train_test(i)[0]), metric), range(k), jobs)

    cells = [(n, c, i) for n in range(m, 0, -1) for c in range(len(specs)) for i in range(k)]

    def run(cell):
        n, c, i = cell
        tr, te = folds.train_test(i)
        spec = PipelineSpec(specs[c], n, metric, "half")
        p = fit_pipeline(prepared[i].train, spec, derive_seed(seed, "cv-fit", i),
                         prepared=prepared[i])
        return auc_score(score_dataset(p, d.subset(te)), d.y[te])

    aucs = _map(run, cells, jobs)
    table: dict[tuple[int, int], list[float]] = {}
    for (n, c, _), a in zip(cells, aucs):
        table.setdefault((n, c), []).append(a)
    return [FeatureSweepRow(n, tuple((labels[c], float(np.mean(table[n, c])))
                                     for c in range(len(specs))))
            for n in range(m, 0, -1)]


@dataclass(frozen=True)
class CostSweepRow:
    x: float
    accuracy: float
    tp_rate: float
    goods_correct: int
    tn_rate: float
    bads_correct: int


def cost_sweep_scores(scores, labels, ratios) -> list[CostSweepRow]:
    ratios = [float(x) for x in ratios]
    if any(x <= 0 for x in ratios):
        raise ModelError("cost ratios must be positive")
    if ratios != sorted(ratios):
        raise ModelError("cost ratios must be ascending")
    rows = []
    for x in ratios:
        cm = confusion_arrays(predict(scores, cost_threshold(x)), labels)
        m = metrics(cm)
        rows.append(CostSweepRow(x, m.accuracy, m.tp_rate, cm.tp, m.tn_rate, cm.tn))
    return rows


def cost_sweep(p: FittedPipeline, test: Dataset, ratios) -> list[CostSweepRow]:
    """Table of accuracy, TP rate, goods correct, TN rate, bads correct per cost ratio."""
    return cost_sweep_scores(score_dataset(p, test), test.y, ratios)


def with_threshold(p: FittedPipeline, t: Threshold) -> FittedPipeline:
    return replace(p, threshold=t)
