from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from credscore.dataset import NOMINAL, NUMERIC, Dataset, Feature, Schema  # noqa: E402
from credscore.synth import SynthSpec, generate  # noqa: E402


def make_dataset(columns: dict, labels, kinds: dict | None = None, groups: dict | None = None):
    """Build a Dataset from plain lists. Strings mean nominal; ``None`` means missing."""
    feats, cols = [], []
    kinds = kinds or {}
    groups = groups or {}
    for name, values in columns.items():
        kind = kinds.get(name) or (NOMINAL if any(isinstance(v, str) for v in values) else NUMERIC)
        group = groups.get(name, "form")
        if kind == NOMINAL:
            cats = tuple(sorted({v for v in values if v is not None}))
            feats.append(Feature(name, NOMINAL, group, cats))
            cols.append(np.array([-1 if v is None else cats.index(v) for v in values], dtype=np.int64))
        else:
            feats.append(Feature(name, NUMERIC, group))
            cols.append(np.array([np.nan if v is None else float(v) for v in values]))
    y = np.array([1 if lab in ("g", "good", 1) else 0 for lab in labels], dtype=np.int64)
    return Dataset(Schema(tuple(feats)), tuple(cols), y)


@pytest.fixture(scope="session")
def default_data() -> Dataset:
    return generate(SynthSpec(seed=3))


@pytest.fixture(scope="session")
def small_data() -> Dataset:
    return generate(SynthSpec(n_good=600, n_bad=60, seed=11))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
