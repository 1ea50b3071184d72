"""Linear soft-margin SVM trained by mini-batch subgradient descent, with Platt scaling."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ..seeding import derive_rng
from .design import Design, one_hot
from .logistic import ConvergenceWarning, logistic_fn


def objective(w, b, X, s, lam) -> float:
    """``lam/2 ||w||^2 + mean hinge``, labels ``s`` in {-1, +1}."""
    margins = s * (X @ w + b)
    return float(0.5 * lam * np.dot(w, w) + np.mean(np.maximum(0.0, 1.0 - margins)))


def subgradient_fit(X, s, lam, epochs=50, batch_size=32, rng=None):
    """Pegasos-style descent with step ``1/(lam t)`` and projection onto the
    ball of radius ``1/sqrt(lam)``.

    The bias is an unpenalised weight on a constant column scaled to the RMS
    row norm (it shares the projection with ``w``), so rescaling ``X`` by ``c`` together with ``lam`` by ``c**-2``
    rescales ``w`` by ``1/c`` and leaves every decision unchanged. Returns the
    epoch-end iterate with the lowest objective.
    """
    n, p = X.shape
    if rng is None:
        rng = np.random.default_rng(0)
    scale = float(np.sqrt(np.mean(np.sum(X * X, axis=1))))
    if scale == 0.0:
        scale = 1.0
    radius = 1.0 / np.sqrt(lam)
    w = np.zeros(p)
    w0 = 0.0
    best = (objective(w, 0.0, X, s, lam), w.copy(), 0.0)
    t = 0
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            batch = order[start:start + batch_size]
            t += 1
            eta = 1.0 / (lam * t)
            xb, sb = X[batch], s[batch]
            viol = sb * (xb @ w + w0 * scale) < 1.0
            w *= 1.0 - eta * lam
            if viol.any():
                w += (eta / len(batch)) * (sb[viol] @ xb[viol])
                w0 += (eta / len(batch)) * scale * sb[viol].sum()
            norm = np.sqrt(np.dot(w, w) + w0 * w0)
            if norm > radius:
                w *= radius / norm
                w0 *= radius / norm
        obj = objective(w, w0 * scale, X, s, lam)
        if obj < best[0]:
            best = (obj, w.copy(), w0 * scale)
    return best[1], best[2], best[0]


def platt_fit(margins, y, max_iter=100):
    """Fit ``P(good) = logistic(A m + B)`` with Platt's smoothed targets."""
    m = np.asarray(margins, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n_pos, n_neg = int(y.sum()), int(len(y) - y.sum())
    target = np.where(y == 1, (n_pos + 1.0) / (n_pos + 2.0), 1.0 / (n_neg + 2.0))
    X = np.column_stack([m, np.ones_like(m)])
    theta = np.array([0.0, np.log((n_pos + 1.0) / (n_neg + 1.0))])

    def nll(th):
        z = X @ th
        return float(np.sum(np.logaddexp(0.0, z) - target * z))

    cur = nll(theta)
    for _ in range(max_iter):
        p = logistic_fn(X @ theta)
        g = X.T @ (p - target)
        if np.max(np.abs(g)) < 1e-10:
            break
        H = (X * (p * (1 - p))[:, None]).T @ X + 1e-12 * np.eye(2)
        step = np.linalg.lstsq(H, g, rcond=None)[0]
        t = 1.0
        while t > 1e-10:
            cand = theta - t * step
            val = nll(cand)
            if val <= cur:
                break
            t *= 0.5
        else:
            break
        if np.array_equal(cand, theta):
            break
        theta, cur = cand, val
    return float(theta[0]), float(theta[1])


@dataclass(frozen=True, eq=False)
class SvmModel:
    w: np.ndarray
    b: float
    A: float
    B: float
    mean: np.ndarray
    std: np.ndarray
    n_bins: tuple[int, ...]

    @property
    def n_features(self) -> int:
        return len(self.n_bins)

    def encode(self, design: Design) -> np.ndarray:
        return (one_hot(design.codes, self.n_bins) - self.mean) / self.std

    def margin(self, design: Design) -> np.ndarray:
        return self.encode(design) @ self.w + self.b

    def score(self, design: Design) -> np.ndarray:
        return logistic_fn(self.A * self.margin(design) + self.B)

    def to_params(self) -> dict:
        return {"w": self.w.tolist(), "b": self.b, "A": self.A, "B": self.B,
                "mean": self.mean.tolist(), "std": self.std.tolist(),
                "n_bins": list(self.n_bins)}

    @classmethod
    def from_params(cls, p: dict) -> "SvmModel":
        return cls(np.asarray(p["w"], dtype=np.float64), float(p["b"]), float(p["A"]),
                   float(p["B"]), np.asarray(p["mean"], dtype=np.float64),
                   np.asarray(p["std"], dtype=np.float64), tuple(p["n_bins"]))


def fit_svm(design: Design, y, C: float = 1.0, epochs: int = 50, batch_size: int = 32,
            seed: int = 0) -> SvmModel:
    """Soft-margin linear SVM on standardized dummy columns.

    ``C`` maps to the per-sample penalty ``lam = 1 / (C n)``, which makes
    the objective proportional to ``1/2 ||w||^2 + C * sum(hinge)``.
    """
    y = np.asarray(y, dtype=np.int64)
    raw = one_hot(design.codes, design.n_bins)
    mean = raw.mean(axis=0) if len(raw) else np.zeros(raw.shape[1])
    std = raw.std(axis=0) if len(raw) else np.ones(raw.shape[1])
    std = np.where(std > 0, std, 1.0)
    X = (raw - mean) / std
    s = np.where(y == 1, 1.0, -1.0)
    lam = 1.0 / (C * len(y))
    w, b, obj = subgradient_fit(X, s, lam, epochs, batch_size, derive_rng(seed, "svm"))
    if epochs > 0 and obj >= objective(np.zeros_like(w), 0.0, X, s, lam):
        warnings.warn("SVM subgradient descent did not improve on w = 0",
                      ConvergenceWarning, stacklevel=2)
    A, B = platt_fit(X @ w + b, y)
    return SvmModel(w, b, A, B, mean, std, design.n_bins)
