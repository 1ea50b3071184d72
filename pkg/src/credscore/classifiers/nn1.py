from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ModelError
from .design import Design

_CHUNK = 256


@dataclass(frozen=True, eq=False)
class Nn1Model:
    """Single nearest neighbour over min-max scaled numerics plus 0/1 nominal mismatch.

    Stored training rows are already scaled, with missing numerics replaced
    by the training mean.
    """

    train: np.ndarray
    labels: np.ndarray
    numeric: tuple[bool, ...]
    lo: np.ndarray
    span: np.ndarray
    fill: np.ndarray

    @property
    def n_features(self) -> int:
        return len(self.numeric)

    def prepare(self, raw: np.ndarray) -> np.ndarray:
        X = np.array(raw, dtype=np.float64)
        num = np.asarray(self.numeric, dtype=bool)
        X[:, num] = (X[:, num] - self.lo[num]) / self.span[num]
        miss = np.isnan(X) & num
        X[miss] = np.broadcast_to(self.fill, X.shape)[miss]
        X[:, ~num] = np.nan_to_num(X[:, ~num], nan=-1.0)
        return X

    def distances(self, rows: np.ndarray) -> np.ndarray:
        """Squared distances from prepared ``rows`` to every stored row."""
        total = np.zeros((rows.shape[0], self.train.shape[0]))
        for j, is_num in enumerate(self.numeric):
            diff = rows[:, j, None] - self.train[None, :, j]
            total += diff * diff if is_num else (diff != 0)
        return total

    def nearest(self, raw: np.ndarray) -> np.ndarray:
        X = self.prepare(raw)
        out = np.empty(X.shape[0], dtype=np.int64)
        for start in range(0, X.shape[0], _CHUNK):
            out[start:start + _CHUNK] = np.argmin(self.distances(X[start:start + _CHUNK]), axis=1)
        return out

    def score(self, design: Design) -> np.ndarray:
        if design.n_rows == 0:
            return np.zeros(0)
        return self.labels[self.nearest(design.raw)].astype(np.float64)

    def to_params(self) -> dict:
        return {"train": self.train.tolist(), "labels": self.labels.tolist(),
                "numeric": list(self.numeric), "lo": self.lo.tolist(),
                "span": self.span.tolist(), "fill": self.fill.tolist()}

    @classmethod
    def from_params(cls, p: dict) -> "Nn1Model":
        m = len(p["numeric"])
        return cls(np.asarray(p["train"], dtype=np.float64).reshape(-1, m),
                   np.asarray(p["labels"], dtype=np.int64), tuple(p["numeric"]),
                   np.asarray(p["lo"], dtype=np.float64),
                   np.asarray(p["span"], dtype=np.float64),
                   np.asarray(p["fill"], dtype=np.float64))


def fit_nn1(design: Design, y, normalize: bool = True) -> Nn1Model:
    if design.n_rows == 0:
        raise ModelError("1-NN needs at least one training instance")
    raw = design.raw
    m = design.n_features
    num = np.asarray(design.numeric, dtype=bool)
    lo = np.zeros(m)
    span = np.ones(m)
    fill = np.zeros(m)
    for j in np.flatnonzero(num):
        col = raw[:, j]
        known = col[~np.isnan(col)]
        if len(known) == 0:
            continue
        if normalize:
            lo[j] = known.min()
            width = known.max() - known.min()
            span[j] = width if width > 0 else 1.0
        fill[j] = np.mean((known - lo[j]) / span[j])
    model = Nn1Model(np.zeros((0, m)), np.asarray(y, dtype=np.int64),
                     design.numeric, lo, span, fill)
    return Nn1Model(model.prepare(raw), model.labels, design.numeric, lo, span, fill)
