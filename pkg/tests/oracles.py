"""Slow, obviously-correct reference implementations used as test oracles.

None of these import the package under test.
"""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import groupby


def mann_whitney(scores, labels) -> Fraction:
    """P(random good outscores random bad), ties counted as half, by pair counting."""
    goods = [s for s, y in zip(scores, labels) if y == 1]
    bads = [s for s, y in zip(scores, labels) if y == 0]
    twice = 0
    for g in goods:
        for b in bads:
            twice += 2 if g > b else (1 if g == b else 0)
    return Fraction(twice, 2 * len(goods) * len(bads))


def _ent(labels) -> float:
    n = len(labels)
    out = 0.0
    for c in set(labels):
        p = labels.count(c) / n
        out -= p * math.log2(p)
    return out


def mdlp(values, labels, tie=1e-12) -> list[float]:
    """Recursive MDLP over every cut between distinct values, boundary filter applied."""
    pairs = sorted(zip(values, labels), key=lambda t: t[0])
    cuts: list[float] = []

    def recurse(part):
        xs = [v for v, _ in part]
        ys = [c for _, c in part]
        n = len(part)
        groups = [(v, [c for _, c in g]) for v, g in groupby(part, key=lambda t: t[0])]
        if len(groups) < 2:
            return
        scored = []
        pos = 0
        for i in range(len(groups) - 1):
            pos += len(groups[i][1])
            a, b = set(groups[i][1]), set(groups[i + 1][1])
            if len(a) == 1 and a == b:
                continue  # not a boundary point
            left, right = ys[:pos], ys[pos:]
            e = (len(left) * _ent(left) + len(right) * _ent(right)) / n
            scored.append((e, i, pos))
        if not scored:
            return
        e_min = min(e for e, _, _ in scored)
        e_best, i, pos = next(t for t in scored if t[0] <= e_min + tie)
        left, right = ys[:pos], ys[pos:]
        ent = _ent(ys)
        gain = ent - e_best
        k, k1, k2 = len(set(ys)), len(set(left)), len(set(right))
        delta = math.log2(3 ** k - 2) - (k * ent - k1 * _ent(left) - k2 * _ent(right))
        if gain <= math.log2(n - 1) / n + delta / n:
            return
        lo, hi = groups[i][0], groups[i + 1][0]
        cuts.append(lo + (hi - lo) / 2.0)
        recurse(part[:pos])
        recurse(part[pos:])

    if pairs:
        recurse(pairs)
    return sorted(cuts)


def bad_f1_scan(scores, labels):
    """Best bad-class F1 over {0, midpoints, 1}, exact in rationals; ties to the larger t."""
    u = sorted(set(scores))
    cands = sorted({0.0, 1.0, *(u[i] + (u[i + 1] - u[i]) / 2.0 for i in range(len(u) - 1))})
    n_bad = sum(1 for y in labels if y == 0)
    best_t, best_f = None, Fraction(-1)
    for t in cands:
        pred_bad = [s <= t for s in scores]
        tp = sum(1 for p, y in zip(pred_bad, labels) if p and y == 0)
        f = Fraction(2 * tp, sum(pred_bad) + n_bad)
        if f >= best_f:
            best_t, best_f = t, f
    return best_t, best_f


def nearest_neighbour_scores(train, train_labels, test, numeric):
    """1-NN P(good) by all-pairs distances over min-max scaled features.

    Numerics are scaled to [0, 1] with the training range; nominals count 1
    on mismatch. No missing values.
    """
    m = len(numeric)
    lo = [min(r[j] for r in train) if numeric[j] else 0.0 for j in range(m)]
    hi = [max(r[j] for r in train) if numeric[j] else 0.0 for j in range(m)]

    def dist2(a, b):
        s = 0.0
        for j in range(m):
            if numeric[j]:
                span = hi[j] - lo[j] or 1.0
                s += ((a[j] - lo[j]) / span - (b[j] - lo[j]) / span) ** 2
            else:
                s += 0.0 if a[j] == b[j] else 1.0
        return s

    out = []
    for q in test:
        d = [dist2(q, r) for r in train]
        best = min(range(len(train)), key=lambda i: (d[i], i))
        out.append(float(train_labels[best]))
    return out


def mann_whitney_pairs(scores, labels) -> Fraction:
    """Same statistic as :func:`mann_whitney`, counting all pairs with numpy."""
    import numpy as np

    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    g = scores[labels == 1]
    b = scores[labels == 0]
    cmp = np.sign(g[:, None] - b[None, :]).astype(np.int64)   # +1 ordered, 0 tie, -1 not
    twice = int(np.sum(cmp + 1))
    return Fraction(twice, 2 * len(g) * len(b))
