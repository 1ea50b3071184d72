"""Weight-of-evidence tables and the plain-text scorecard report."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import Dataset, class_counts, format_number
from .errors import DataError

SMOOTHING = 0.5


@dataclass(frozen=True)
class WoeRow:
    feature: str
    bin: str
    good_count: int
    bad_count: int
    share_good: float
    share_bad: float
    woe: float
    smoothed: bool = False


def woe(share_good: float, share_bad: float) -> float:
    """``ln(share_good / share_bad)``; positive means the bin leans good."""
    if share_good <= 0 or share_bad <= 0:
        raise ValueError("WOE needs strictly positive shares; smooth zero cells first")
    return math.log(share_good / share_bad)


def woe_table(d: Dataset, features: Sequence[str] | None = None,
              smoothing: float = SMOOTHING) -> list[WoeRow]:
    """WOE per bin of each (nominal) feature, in schema then bin order.

    Missing values are left out. When any bin of a feature has zero goods or
    zero bads, ``smoothing`` is added to every bin's good and bad counts of
    that feature before the shares are taken.
    """
    n_good, n_bad = class_counts(d)
    if n_good == 0 or n_bad == 0:
        raise DataError("WOE needs both classes")
    wanted = d.schema.names if features is None else list(features)
    unknown = set(wanted) - set(d.schema.names)
    if unknown:
        raise DataError(f"unknown features: {sorted(unknown)}")
    rows = []
    for f, col in zip(d.schema.features, d.columns):
        if f.name not in wanted:
            continue
        if f.is_numeric:
            raise DataError(f"feature {f.name!r} is numeric; discretize first")
        known = col >= 0
        tab = np.bincount(col[known] * 2 + d.y[known],
                          minlength=2 * len(f.categories)).reshape(-1, 2)
        bad, good = tab[:, 0], tab[:, 1]
        adj = smoothing if (bad == 0).any() or (good == 0).any() else 0.0
        g = good + adj
        b = bad + adj
        sg, sb = g / g.sum(), b / b.sum()
        for i, label in enumerate(f.categories):
            rows.append(WoeRow(f.name, label, int(good[i]), int(bad[i]), float(sg[i]),
                               float(sb[i]), woe(sg[i], sb[i]), adj > 0))
    return rows


def woe_csv(rows: Sequence[WoeRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["feature", "bin", "good_count", "bad_count", "share_good", "share_bad",
                "woe", "smoothed"])
    for r in rows:
        w.writerow([r.feature, r.bin, r.good_count, r.bad_count, format_number(r.share_good),
                    format_number(r.share_bad), format_number(r.woe), int(r.smoothed)])
    return buf.getvalue()


def woe_report(rows: Sequence[WoeRow], note: str = "") -> str:
    """Aligned text table: attribute, bin, WOE, then the counts behind it."""
    header = ("Attribute", "Bin", "WOE", "Goods", "Bads", "Good share", "Bad share")
    body = []
    last = None
    for r in rows:
        body.append((r.feature if r.feature != last else "", r.bin, f"{r.woe:.3f}",
                     str(r.good_count), str(r.bad_count), f"{r.share_good:.4f}",
                     f"{r.share_bad:.4f}"))
        last = r.feature
    widths = [max(len(x[i]) for x in [header, *body]) for i in range(len(header))]
    right = {2, 3, 4, 5, 6}

    def fmt(cells):
        return "  ".join(c.rjust(w) if i in right else c.ljust(w)
                         for i, (c, w) in enumerate(zip(cells, widths))).rstrip()

    lines = []
    if note:
        lines += [f"# {line}" for line in note.splitlines()]
    lines += [fmt(header), fmt(["-" * w for w in widths])]
    lines += [fmt(b) for b in body]
    if any(r.smoothed for r in rows):
        lines.append(f"# features with an empty good or bad cell had {SMOOTHING} added "
                     "to every count")
    return "\n".join(lines) + "\n"
