"""The six candidate classifiers behind one contract: ``score`` returns P(good).

Every model is fitted from a :class:`Design` and labels (1 = good, 0 = bad).
Naive Bayes, the tree and the forest read the discretized bin codes;
logistic regression and the SVM read a one-hot expansion of those codes;
1-NN reads the raw values.
"""
from __future__ import annotations

from dataclasses import dataclass, fields, replace

import numpy as np

from ..errors import ModelError
from .design import Design, one_hot
from .logistic import LogisticModel, fit_logistic, logistic_fn
from .naive_bayes import NaiveBayesModel, fit_naive_bayes
from .nn1 import Nn1Model, fit_nn1
from .svm import SvmModel, fit_svm
from .tree import ForestModel, TreeModel, fit_forest, fit_tree

KINDS = ("naive_bayes", "logistic", "nn1", "tree", "forest", "svm_linear")

MODEL_TYPES = {
    "naive_bayes": NaiveBayesModel,
    "logistic": LogisticModel,
    "nn1": Nn1Model,
    "tree": TreeModel,
    "forest": ForestModel,
    "svm_linear": SvmModel,
}


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str = "naive_bayes"
    alpha: float = 1.0          # Laplace pseudo-count (NB, tree leaves)
    ridge: float = 1e-8         # logistic
    max_iter: int = 100         # logistic Newton iterations
    tol: float = 1e-6           # logistic gradient tolerance (inf-norm)
    normalize: bool = True      # nn1 min-max scaling
    min_leaf: int = 2           # tree / forest
    prune: bool = False         # tree
    n_trees: int = 100          # forest
    max_features: int = 0       # forest per-node subset; 0 means ceil(sqrt(m))
    bootstrap: bool = True      # forest
    C: float = 1.0              # svm complexity
    epochs: int = 50            # svm
    batch_size: int = 32        # svm

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ModelError(f"unknown classifier kind {self.kind!r}; expected one of {KINDS}")
        for name in ("alpha", "C"):
            if not getattr(self, name) > 0:
                raise ModelError(f"{name} must be positive")
        for name in ("min_leaf", "n_trees", "batch_size"):
            if getattr(self, name) < 1:
                raise ModelError(f"{name} must be at least 1")
        for name in ("ridge", "tol", "max_iter", "epochs", "max_features"):
            if getattr(self, name) < 0:
                raise ModelError(f"{name} must be non-negative")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, d: dict) -> "ClassifierSpec":
        return cls(**d)

    def with_(self, **kw) -> "ClassifierSpec":
        return replace(self, **kw)


def fit_classifier(spec: ClassifierSpec, design: Design, y, seed: int = 0, jobs: int = 1):
    y = np.asarray(y, dtype=np.int64)
    if len(y) == 0 or y.min() == y.max():
        raise ModelError("training data must contain both classes")
    if spec.kind == "naive_bayes":
        return fit_naive_bayes(design, y, alpha=spec.alpha)
    if spec.kind == "logistic":
        return fit_logistic(design, y, ridge=spec.ridge, max_iter=spec.max_iter, tol=spec.tol)
    if spec.kind == "nn1":
        return fit_nn1(design, y, normalize=spec.normalize)
    if spec.kind == "tree":
        return fit_tree(design, y, min_leaf=spec.min_leaf, prune=spec.prune, alpha=spec.alpha)
    if spec.kind == "forest":
        return fit_forest(design, y, n_trees=spec.n_trees, max_features=spec.max_features,
                          bootstrap=spec.bootstrap, min_leaf=spec.min_leaf,
                          alpha=spec.alpha, seed=seed, jobs=jobs)
    return fit_svm(design, y, C=spec.C, epochs=spec.epochs,
                   batch_size=spec.batch_size, seed=seed)


def score(model, design: Design) -> np.ndarray:
    """P(good) for every row of ``design``."""
    if design.n_features != model.n_features:
        raise ModelError(f"model expects {model.n_features} features, "
                         f"got {design.n_features}")
    p = np.asarray(model.score(design), dtype=np.float64)
    if not np.all(np.isfinite(p)):
        raise ModelError("non-finite score")
    return np.clip(p, 0.0, 1.0)


def model_to_params(model) -> dict:
    return model.to_params()


def model_from_params(kind: str, params: dict):
    try:
        cls = MODEL_TYPES[kind]
    except KeyError:
        raise ModelError(f"unknown classifier kind {kind!r}") from None
    return cls.from_params(params)


__all__ = [
    "ClassifierSpec", "Design", "KINDS", "fit_classifier", "score", "one_hot",
    "logistic_fn", "fit_logistic", "fit_naive_bayes", "fit_nn1", "fit_tree",
    "fit_forest", "fit_svm", "NaiveBayesModel", "LogisticModel", "Nn1Model",
    "TreeModel", "ForestModel", "SvmModel", "model_to_params", "model_from_params",
]
