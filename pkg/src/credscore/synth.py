"""Synthetic applicant data: two feature groups, planted signal, heavy imbalance.

The default design has 11 application-form features (7 informative) and 18
bank-statement features (5 informative), 7401 goods and 121 bads. Features
are drawn independently given the class unless ``correlation`` is set, in
which case all numeric features share a latent factor.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .dataset import NOMINAL, NUMERIC, Dataset, Feature, Schema
from .errors import DataError
from .seeding import derive_rng


@dataclass(frozen=True)
class NumericConfig:
    """Normal feature; the bad-class mean sits ``shift`` good-class SDs away."""

    name: str
    group: str
    mean: float = 0.0
    sd: float = 1.0
    shift: float = 0.0
    decimals: int = 2


@dataclass(frozen=True)
class NominalConfig:
    """Categorical feature; ``p_bad`` is the bad-class distribution at full strength."""

    name: str
    group: str
    categories: tuple[str, ...]
    p_good: tuple[float, ...]
    p_bad: tuple[float, ...] | None = None


FeatureConfig = Union[NumericConfig, NominalConfig]


def _yes_no(name, group, p_good_yes, p_bad_yes=None):
    p_bad = None if p_bad_yes is None else (1 - p_bad_yes, p_bad_yes)
    return NominalConfig(name, group, ("No", "Yes"), (1 - p_good_yes, p_good_yes), p_bad)


def default_features() -> tuple[FeatureConfig, ...]:
    form, bank = "form", "bank"
    return (
        NumericConfig("Demographic Feature 1", form, 38.0, 11.0, -0.7, 0),
        NumericConfig("Demographic Feature 2", form, 4.0, 2.5, -0.7, 1),
        NominalConfig("Demographic Feature 3", form, ("A", "B", "C", "D"),
                      (0.40, 0.30, 0.20, 0.10), (0.20, 0.25, 0.30, 0.25)),
        NumericConfig("Loan Feature 1", form, 1500.0, 600.0, 0.7, 0),
        NumericConfig("Employment Feature 1", form, 36.0, 20.0, -0.7, 0),
        NominalConfig("Employment Feature 2", form, ("Full-time", "Part-time", "Casual", "None"),
                      (0.60, 0.20, 0.12, 0.08), (0.40, 0.22, 0.20, 0.18)),
        NumericConfig("Demographic Feature 4", form, 20.0, 6.0, 0.75, 1),
        NumericConfig("Demographic Feature 5", form, 50.0, 15.0),
        NominalConfig("Demographic Feature 7", form, ("M", "F", "X"), (0.5, 0.45, 0.05)),
        NumericConfig("Demographic Feature 8", form, 10.0, 4.0),
        _yes_no("Demographic Feature 9", form, 0.3),
        NumericConfig("Bank Statement Transaction Feature 1", bank, 8.0, 4.0, 0.75, 1),
        NumericConfig("Bank Statement Transaction Feature 2", bank, 2500.0, 900.0, -0.7, 0),
        NumericConfig("Bank Statement Transaction Feature 3", bank, 20.0, 6.0, 0.0, 1),
        NumericConfig("Demographic Feature 6", bank, 5.0, 2.0, -0.7, 1),
        _yes_no("Credit Card Type 1", bank, 0.35, 0.17),
        _yes_no("Credit Card Type 2", bank, 0.20),
        _yes_no("Credit Card Type 3", bank, 0.10),
        _yes_no("Credit Card Type 4", bank, 0.05),
        _yes_no("Bank 1", bank, 0.30, 0.52),
        _yes_no("Bank 2", bank, 0.25),
        _yes_no("Bank 3", bank, 0.15),
        _yes_no("Bank 4", bank, 0.10),
        _yes_no("Bank 5", bank, 0.08),
        _yes_no("Bank 6", bank, 0.05),
        _yes_no("Benefit Type 1", bank, 0.12),
        _yes_no("Benefit Type 2", bank, 0.08),
        _yes_no("Benefit Type 3", bank, 0.04),
        _yes_no("Benefit Type 4", bank, 0.03),
    )


@dataclass(frozen=True)
class SynthSpec:
    n_good: int = 7401
    n_bad: int = 121
    features: tuple[FeatureConfig, ...] = field(default_factory=default_features)
    strength: dict = field(default_factory=lambda: {"form": 1.0, "bank": 1.0})
    correlation: float = 0.0
    missing_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_good < 1 or self.n_bad < 1:
            raise DataError("class counts must be positive")
        if not 0.0 <= self.correlation < 1.0:
            raise DataError("correlation must lie in [0, 1)")
        if not 0.0 <= self.missing_rate < 1.0:
            raise DataError("missing_rate must lie in [0, 1)")
        if any(s < 0 for s in self.strength.values()):
            raise DataError("signal strengths must be non-negative")
        for f in self.features:
            if isinstance(f, NominalConfig):
                for p in (f.p_good, f.p_bad):
                    if p is None:
                        continue
                    if len(p) != len(f.categories) or min(p) <= 0 or abs(sum(p) - 1) > 1e-9:
                        raise DataError(f"{f.name}: probabilities must be positive, "
                                        "one per category, summing to 1")

    def informative(self) -> list[str]:
        """Names of features that carry class signal at non-zero strength."""
        out = []
        for f in self.features:
            s = self.strength.get(f.group, 1.0)
            if s == 0:
                continue
            if isinstance(f, NumericConfig) and f.shift != 0:
                out.append(f.name)
            elif isinstance(f, NominalConfig) and f.p_bad is not None and f.p_bad != f.p_good:
                out.append(f.name)
        return out


def _bad_probs(f: NominalConfig, s: float) -> np.ndarray:
    """Log-linear path from the good distribution (s=0) to ``p_bad`` (s=1)."""
    pg = np.asarray(f.p_good)
    if f.p_bad is None or s == 0:
        return pg
    logp = (1 - s) * np.log(pg) + s * np.log(np.asarray(f.p_bad))
    p = np.exp(logp - logp.max())
    return p / p.sum()


def generate(spec: SynthSpec | None = None) -> Dataset:
    """Draw a dataset with exactly ``n_good`` goods and ``n_bad`` bads."""
    spec = spec or SynthSpec()
    n = spec.n_good + spec.n_bad
    y = np.r_[np.ones(spec.n_good, dtype=np.int64), np.zeros(spec.n_bad, dtype=np.int64)]
    y = y[derive_rng(spec.seed, "synth-labels").permutation(n)]
    latent = derive_rng(spec.seed, "synth-latent").standard_normal(n)
    rho = spec.correlation

    features, cols = [], []
    for j, f in enumerate(spec.features):
        rng = derive_rng(spec.seed, "synth-feature", j)
        s = spec.strength.get(f.group, 1.0)
        if isinstance(f, NumericConfig):
            z = np.sqrt(1 - rho) * rng.standard_normal(n) + np.sqrt(rho) * latent
            z = z + np.where(y == 0, f.shift * s, 0.0)
            col = np.round(f.mean + f.sd * z, f.decimals) + 0.0
            features.append(Feature(f.name, NUMERIC, f.group))
        else:
            u = rng.random(n)
            cum_g = np.cumsum(f.p_good)
            cum_b = np.cumsum(_bad_probs(f, s))
            col = np.where(y == 1,
                           np.searchsorted(cum_g[:-1], u, side="right"),
                           np.searchsorted(cum_b[:-1], u, side="right")).astype(np.int64)
            features.append(Feature(f.name, NOMINAL, f.group, f.categories))
        if spec.missing_rate > 0:
            miss = derive_rng(spec.seed, "synth-missing", j).random(n) < spec.missing_rate
            col = np.where(miss, np.nan, col) if isinstance(f, NumericConfig) else np.where(miss, -1, col)
        cols.append(col)
    schema = Schema(tuple(features), "class", "good", "bad")
    return Dataset(schema, tuple(cols), y)
