from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class Design:
    """Model inputs for the selected features, in two parallel views.

    Attributes
    ----------
    codes : (n, m) int array
        Discretized bin (or category) code per feature, ``-1`` for missing.
    n_bins : tuple of int
        Number of bins per feature.
    raw : (n, m) float array
        Raw numeric values; nominal features hold their category code.
        ``nan`` marks missing.
    numeric : tuple of bool
        Whether each feature was numeric before discretization.
    """

    codes: np.ndarray
    n_bins: tuple[int, ...]
    raw: np.ndarray
    numeric: tuple[bool, ...]

    @property
    def n_rows(self) -> int:
        return self.codes.shape[0]

    @property
    def n_features(self) -> int:
        return len(self.n_bins)

    def rows(self, idx) -> "Design":
        idx = np.asarray(idx)
        return Design(self.codes[idx], self.n_bins, self.raw[idx], self.numeric)

    @classmethod
    def from_codes(cls, codes, n_bins) -> "Design":
        """Design with only nominal features, for models that read codes."""
        codes = np.asarray(codes, dtype=np.int64)
        if codes.ndim == 1:
            codes = codes[:, None]
        raw = np.where(codes < 0, np.nan, codes).astype(np.float64)
        return cls(codes, tuple(int(b) for b in n_bins), raw, (False,) * codes.shape[1])

    @classmethod
    def from_raw(cls, raw, numeric) -> "Design":
        """Design from raw values; numeric features get a single placeholder bin."""
        raw = np.asarray(raw, dtype=np.float64)
        if raw.ndim == 1:
            raw = raw[:, None]
        numeric = tuple(bool(b) for b in numeric)
        codes = np.where(np.isnan(raw), -1, 0).astype(np.int64)
        n_bins = []
        for j, is_num in enumerate(numeric):
            if is_num:
                n_bins.append(1)
            else:
                col = raw[:, j]
                codes[:, j] = np.where(np.isnan(col), -1, np.nan_to_num(col, nan=0.0)).astype(np.int64)
                n_bins.append(int(np.nanmax(col)) + 1 if np.isfinite(col).any() else 1)
        return cls(codes, tuple(n_bins), raw, numeric)


def one_hot(codes: np.ndarray, n_bins) -> np.ndarray:
    """Dummy-encode bin codes, dropping bin 0 of each feature as the reference.

    Missing codes encode as all zeros.
    """
    codes = np.asarray(codes, dtype=np.int64)
    width = sum(b - 1 for b in n_bins)
    X = np.zeros((codes.shape[0], width), dtype=np.float64)
    offset = 0
    for j, b in enumerate(n_bins):
        col = codes[:, j]
        rows = np.flatnonzero(col > 0)
        X[rows, offset + col[rows] - 1] = 1.0
        offset += b - 1
    return X
