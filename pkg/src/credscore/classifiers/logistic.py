from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .design import Design, one_hot


class ConvergenceWarning(UserWarning):
    pass


def logistic_fn(x):
    """``1 / (1 + exp(-x))``, evaluated without overflow for large ``|x|``."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out if out.ndim else float(out)


def _log1pexp(z):
    return np.logaddexp(0.0, z)


def log_likelihood(beta, X, y, ridge: float = 0.0) -> float:
    """Ridge-penalised log-likelihood; ``X`` carries the intercept in column 0."""
    z = X @ beta
    ll = np.sum(y * z - _log1pexp(z))
    return float(ll - 0.5 * ridge * np.dot(beta[1:], beta[1:]))


def gradient(beta, X, y, ridge: float = 0.0) -> np.ndarray:
    g = X.T @ (y - logistic_fn(X @ beta))
    g[1:] -= ridge * beta[1:]
    return g


def hessian(beta, X, ridge: float = 0.0) -> np.ndarray:
    p = logistic_fn(X @ beta)
    H = (X * (p * (1 - p))[:, None]).T @ X
    H[1:, 1:] += ridge * np.eye(len(beta) - 1)
    return H


def newton_fit(X, y, ridge=1e-8, max_iter=100, tol=1e-6):
    """Maximise :func:`log_likelihood` by damped Newton steps.

    Returns ``(beta, converged)``. On non-convergence the best iterate seen is
    returned.
    """
    beta = np.zeros(X.shape[1])
    ll = log_likelihood(beta, X, y, ridge)
    for _ in range(max_iter):
        g = gradient(beta, X, y, ridge)
        if np.max(np.abs(g)) <= tol:
            return beta, True
        H = hessian(beta, X, ridge)
        H[0, 0] += 1e-12
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, g, rcond=None)[0]
        t = 1.0
        while t > 1e-10:
            cand = beta + t * step
            cand_ll = log_likelihood(cand, X, y, ridge)
            if cand_ll >= ll:
                break
            t *= 0.5
        else:
            break
        if cand_ll == ll and np.array_equal(cand, beta):
            break
        beta, ll = cand, cand_ll
    g = gradient(beta, X, y, ridge)
    return beta, bool(np.max(np.abs(g)) <= tol)


@dataclass(frozen=True, eq=False)
class LogisticModel:
    beta: np.ndarray              # intercept first, then one weight per dummy column
    n_bins: tuple[int, ...]
    converged: bool = True

    @property
    def n_features(self) -> int:
        return len(self.n_bins)

    def design_matrix(self, design: Design) -> np.ndarray:
        X = one_hot(design.codes, self.n_bins)
        return np.hstack([np.ones((X.shape[0], 1)), X])

    def score(self, design: Design) -> np.ndarray:
        return logistic_fn(self.design_matrix(design) @ self.beta)

    def to_params(self) -> dict:
        return {"beta": self.beta.tolist(), "n_bins": list(self.n_bins),
                "converged": self.converged}

    @classmethod
    def from_params(cls, p: dict) -> "LogisticModel":
        return cls(np.asarray(p["beta"], dtype=np.float64), tuple(p["n_bins"]),
                   bool(p["converged"]))


def fit_logistic(design: Design, y, ridge=1e-8, max_iter=100, tol=1e-6) -> LogisticModel:
    model = LogisticModel(np.zeros(1 + sum(b - 1 for b in design.n_bins)), design.n_bins)
    X = model.design_matrix(design)
    beta, ok = newton_fit(X, np.asarray(y, dtype=np.float64), ridge, max_iter, tol)
    if not ok and max_iter > 0:
        warnings.warn(f"logistic fit did not reach gradient tolerance {tol} "
                      f"in {max_iter} iterations", ConvergenceWarning, stacklevel=2)
    return LogisticModel(beta, design.n_bins, ok)
