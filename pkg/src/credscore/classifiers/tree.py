"""Multiway information-gain decision tree over bin codes, and a bagged forest of them."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..seeding import derive_rng
from .design import Design

_EPS = 1e-12


def _entropy2(bad, good):
    n = bad + good
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.zeros(np.broadcast(bad, good).shape)
        for c in (bad, good):
            p = np.where(n > 0, c / np.where(n > 0, n, 1), 0.0)
            out -= np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return out


def _leaf(counts):
    return {"counts": [int(counts[0]), int(counts[1])]}


def _best_split(codes, n_bins, y, idx, candidates):
    """Return ``(gain, feature)`` of the highest-gain candidate, lowest index on ties.

    Zero-gain splits are allowed so that interactions such as XOR, invisible
    to every single feature, can still be reached one level down.
    """
    yy = y[idx]
    best_gain, best_j = -1.0, -1
    for j in candidates:
        col = codes[idx, j]
        known = col >= 0
        nk = int(known.sum())
        if nk == 0:
            continue
        tab = np.bincount(col[known] * 2 + yy[known], minlength=2 * n_bins[j]).reshape(-1, 2)
        if (tab.sum(axis=1) > 0).sum() < 2:
            continue
        tot = tab.sum(axis=0)
        parent = float(_entropy2(tot[0], tot[1]))
        rows = tab.sum(axis=1)
        child = float(np.sum(rows / nk * _entropy2(tab[:, 0], tab[:, 1])))
        gain = (parent - child) * nk / len(idx)
        if gain > best_gain + _EPS:
            best_gain, best_j = gain, j
    return best_gain, best_j


def _grow(codes, n_bins, y, idx, min_leaf, rng, max_features):
    counts = np.bincount(y[idx], minlength=2)
    node = _leaf(counts)
    if counts.min() == 0 or len(idx) < 2 * min_leaf:
        return node
    m = len(n_bins)
    if rng is not None and max_features < m:
        candidates = np.sort(rng.choice(m, size=max_features, replace=False))
    else:
        candidates = range(m)
    gain, j = _best_split(codes, n_bins, y, idx, candidates)
    if j < 0:
        return node
    col = codes[idx, j]
    sizes = np.bincount(col[col >= 0], minlength=n_bins[j])
    if (sizes >= min_leaf).sum() < 2:
        return node
    default = int(np.argmax(sizes))
    route = np.where(col >= 0, col, default)
    children = []
    for b in range(n_bins[j]):
        sub = idx[route == b]
        if len(sub) == 0:
            children.append(_leaf(counts))
        else:
            children.append(_grow(codes, n_bins, y, sub, min_leaf, rng, max_features))
    node.update(feature=int(j), default=default, children=children)
    return node


def _leaf_error(counts, alpha):
    n = counts[0] + counts[1]
    return n * (1.0 - (max(counts) + alpha) / (n + 2 * alpha))


def _prune(node, alpha):
    """Collapse subtrees whose leaves err at least as much as the node would alone."""
    if "children" not in node:
        return _leaf_error(node["counts"], alpha)
    below = sum(_prune(c, alpha) for c in node["children"])
    here = _leaf_error(node["counts"], alpha)
    if below >= here:
        for key in ("feature", "default", "children"):
            del node[key]
        return here
    return below


def _score_node(node, codes, idx, out, alpha):
    if "children" not in node:
        bad, good = node["counts"]
        out[idx] = (good + alpha) / (good + bad + 2 * alpha)
        return
    col = codes[idx, node["feature"]]
    n_children = len(node["children"])
    route = np.where((col >= 0) & (col < n_children), col, node["default"])
    for b, child in enumerate(node["children"]):
        sub = idx[route == b]
        if len(sub):
            _score_node(child, codes, sub, out, alpha)


def _depth(node):
    if "children" not in node:
        return 0
    return 1 + max(_depth(c) for c in node["children"])


def _n_leaves(node):
    if "children" not in node:
        return 1
    return sum(_n_leaves(c) for c in node["children"])


@dataclass(frozen=True, eq=False)
class TreeModel:
    """A fitted tree: nested dict nodes with class ``counts`` ([bad, good]).

    Internal nodes add ``feature``, ``children`` (one per bin) and
    ``default``, the child that receives missing values.
    """

    root: dict
    n_bins: tuple[int, ...]
    alpha: float = 1.0

    @property
    def n_features(self) -> int:
        return len(self.n_bins)

    @property
    def depth(self) -> int:
        return _depth(self.root)

    @property
    def n_leaves(self) -> int:
        return _n_leaves(self.root)

    def score(self, design: Design) -> np.ndarray:
        out = np.empty(design.n_rows)
        _score_node(self.root, design.codes, np.arange(design.n_rows), out, self.alpha)
        return out

    def to_params(self) -> dict:
        return {"root": self.root, "n_bins": list(self.n_bins), "alpha": self.alpha}

    @classmethod
    def from_params(cls, p: dict) -> "TreeModel":
        return cls(p["root"], tuple(p["n_bins"]), float(p["alpha"]))


def fit_tree(design: Design, y, min_leaf: int = 2, prune: bool = False,
             alpha: float = 1.0) -> TreeModel:
    y = np.asarray(y, dtype=np.int64)
    root = _grow(design.codes, design.n_bins, y, np.arange(design.n_rows),
                 min_leaf, None, design.n_features)
    if prune:
        _prune(root, alpha)
    return TreeModel(root, design.n_bins, alpha)


@dataclass(frozen=True, eq=False)
class ForestModel:
    trees: tuple[TreeModel, ...]

    @property
    def n_features(self) -> int:
        return self.trees[0].n_features

    def score(self, design: Design) -> np.ndarray:
        total = np.zeros(design.n_rows)
        for t in self.trees:
            total += t.score(design)
        return total / len(self.trees)

    def to_params(self) -> dict:
        return {"trees": [t.to_params() for t in self.trees]}

    @classmethod
    def from_params(cls, p: dict) -> "ForestModel":
        return cls(tuple(TreeModel.from_params(t) for t in p["trees"]))


def fit_forest(design: Design, y, n_trees: int = 100, max_features: int = 0,
               bootstrap: bool = True, min_leaf: int = 2, alpha: float = 1.0,
               seed: int = 0, jobs: int = 1) -> ForestModel:
    """Bagged random-subspace trees; tree ``i`` draws from its own derived seed."""
    y = np.asarray(y, dtype=np.int64)
    m = design.n_features
    k = max_features if max_features > 0 else math.ceil(math.sqrt(m))
    k = min(k, m)
    n = design.n_rows

    def one(i):
        rng = derive_rng(seed, "forest-tree", i)
        idx = rng.integers(0, n, n) if bootstrap else np.arange(n)
        if np.bincount(y[idx], minlength=2).min() == 0:
            idx = np.arange(n)
        root = _grow(design.codes, design.n_bins, y, np.sort(idx), min_leaf, rng, k)
        return TreeModel(root, design.n_bins, alpha)

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            trees = list(pool.map(one, range(n_trees)))
    else:
        trees = [one(i) for i in range(n_trees)]
    return ForestModel(tuple(trees))
