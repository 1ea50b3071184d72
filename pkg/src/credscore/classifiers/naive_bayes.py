from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import Design


@dataclass(frozen=True, eq=False)
class NaiveBayesModel:
    """Categorical Naive Bayes over bin codes.

    ``priors`` is ``[P(bad), P(good)]``; ``conditionals[j][b]`` is
    ``[P(bin b | bad), P(bin b | good)]`` for feature ``j``.
    """

    priors: np.ndarray
    conditionals: tuple[np.ndarray, ...]

    @property
    def n_features(self) -> int:
        return len(self.conditionals)

    def predict_proba(self, design: Design) -> np.ndarray:
        """Posterior ``[P(bad|x), P(good|x)]`` per row.

        A missing value contributes no factor.
        """
        log_joint = np.tile(np.log(self.priors), (design.n_rows, 1))
        for j, cond in enumerate(self.conditionals):
            col = design.codes[:, j]
            known = col >= 0
            log_joint[known] += np.log(cond[col[known]])
        log_joint -= log_joint.max(axis=1, keepdims=True)
        joint = np.exp(log_joint)
        return joint / joint.sum(axis=1, keepdims=True)

    def score(self, design: Design) -> np.ndarray:
        return self.predict_proba(design)[:, 1]

    def to_params(self) -> dict:
        return {"priors": self.priors.tolist(),
                "conditionals": [c.tolist() for c in self.conditionals]}

    @classmethod
    def from_params(cls, p: dict) -> "NaiveBayesModel":
        return cls(np.asarray(p["priors"], dtype=np.float64),
                   tuple(np.asarray(c, dtype=np.float64).reshape(-1, 2)
                         for c in p["conditionals"]))


def fit_naive_bayes(design: Design, y, alpha: float = 1.0) -> NaiveBayesModel:
    y = np.asarray(y, dtype=np.int64)
    class_n = np.bincount(y, minlength=2).astype(np.float64)
    priors = (class_n + alpha) / (class_n.sum() + 2 * alpha)
    conditionals = []
    for j, n_bins in enumerate(design.n_bins):
        col = design.codes[:, j]
        known = col >= 0
        counts = np.zeros((n_bins, 2), dtype=np.float64)
        np.add.at(counts, (col[known], y[known]), 1.0)
        conditionals.append((counts + alpha) / (counts.sum(axis=0) + alpha * n_bins))
    return NaiveBayesModel(priors, tuple(conditionals))
