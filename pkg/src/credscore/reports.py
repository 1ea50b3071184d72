"""CSV renderings of rankings, metrics, ROC points and sweep tables."""
from __future__ import annotations

import csv
import io
import math
from typing import Iterable, Sequence

import numpy as np

from .dataset import Schema, format_number
from .evaluate import CostSweepRow, CVResult, FeatureSweepRow, MetricSet, RocCurve
from .rank import FeatureRanking

UNDEFINED = "undefined"


def _num(x) -> str:
    if x is None:
        return UNDEFINED
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format_number(x)


def _render(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([c if isinstance(c, str) else _num(c) for c in r])
    return buf.getvalue()


def ranking_csv(r: FeatureRanking, schema: Schema) -> str:
    return _render(["rank", "feature", "group", "statistic"],
                   [(i, name, schema.feature(name).group, stat)
                    for i, (name, stat) in enumerate(r.rows, 1)])


METRIC_COLUMNS = ("accuracy", "tp_rate", "tn_rate", "fp_rate", "precision", "recall", "f1")


def metrics_row(m: MetricSet) -> list:
    return [getattr(m, k) for k in METRIC_COLUMNS]


def cv_metrics_csv(res: CVResult) -> str:
    """Per-fold confusion counts and metrics, then the fold mean and the pooled AUC.

    Precision, recall and F1 are for the good class.
    """
    header = ["fold", "tp", "fp", "tn", "fn", *METRIC_COLUMNS, "auc", "threshold",
              "threshold_provenance"]
    rows = []
    for f in res.folds:
        c = f.confusion
        rows.append([f.fold, c.tp, c.fp, c.tn, c.fn, *metrics_row(f.metrics), f.auc,
                     f.threshold.t, f.threshold.provenance])
    means = []
    for k in METRIC_COLUMNS:
        vals = [getattr(f.metrics, k) for f in res.folds]
        means.append(None if any(v is None for v in vals) else float(np.mean(vals)))
    rows.append(["mean", "", "", "", "", *means, res.mean_auc, "", ""])
    rows.append(["pooled", "", "", "", "", *([""] * len(METRIC_COLUMNS)), res.pooled_auc, "", ""])
    return _render(header, rows)


def roc_csv(c: RocCurve) -> str:
    return _render(["threshold", "fp_rate", "tp_rate"],
                   zip(c.thresholds.tolist(), c.fp_rate.tolist(), c.tp_rate.tolist()))


def feature_sweep_csv(rows: Sequence[FeatureSweepRow]) -> str:
    labels = [name for name, _ in rows[0].auc] if rows else []
    return _render(["n_features", *labels],
                   [[r.n_features, *(a for _, a in r.auc)] for r in rows])


COST_COLUMNS = ("x", "accuracy", "tp_rate", "goods_correct", "tn_rate", "bads_correct")


def cost_sweep_csv(rows: Sequence[CostSweepRow]) -> str:
    return _render(COST_COLUMNS, [[getattr(r, k) for k in COST_COLUMNS] for r in rows])


def scores_csv(scores, predicted, actual, labels: tuple[str, str]) -> str:
    """``labels`` is ``(good_label, bad_label)``."""
    good, bad = labels
    return _render(["row", "score", "predicted", "actual"],
                   [(i + 1, float(s), good if p else bad, good if a else bad)
                    for i, (s, p, a) in enumerate(zip(scores, predicted, actual))])
