"""Dataset representation, CSV/schema ingestion and stratified folds.

A :class:`Dataset` is stored column-wise: numeric features as float arrays
with ``nan`` for missing values, nominal features as int arrays of category
codes with ``-1`` for missing. Labels are an int array with 1 = good and
0 = bad.
"""
from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO, Union

import numpy as np

from .errors import DataError
from .seeding import derive_rng

NUMERIC = "numeric"
NOMINAL = "nominal"
GROUPS = ("form", "bank")

GOOD = "good"
BAD = "bad"

Value = Union[float, str, None]


@dataclass(frozen=True)
class Feature:
    name: str
    kind: str
    group: str = "form"
    categories: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in (NUMERIC, NOMINAL):
            raise DataError(f"feature {self.name!r}: unknown kind {self.kind!r}")
        if self.group not in GROUPS:
            raise DataError(f"feature {self.name!r}: unknown group {self.group!r}")
        if self.kind == NOMINAL:
            if not self.categories:
                raise DataError(f"feature {self.name!r}: empty nominal domain")
            if len(set(self.categories)) != len(self.categories):
                raise DataError(f"feature {self.name!r}: duplicate categories")
        elif self.categories:
            raise DataError(f"feature {self.name!r}: numeric feature with categories")

    @property
    def is_numeric(self) -> bool:
        return self.kind == NUMERIC


@dataclass(frozen=True)
class Schema:
    features: tuple[Feature, ...]
    class_name: str = "class"
    positive_label: str = "good"
    negative_label: str = "bad"

    def __post_init__(self):
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise DataError("feature names must be unique")
        if self.class_name in names:
            raise DataError(f"class column {self.class_name!r} clashes with a feature")
        if self.positive_label == self.negative_label:
            raise DataError("good and bad labels must differ")

    @property
    def names(self) -> list[str]:
        return [f.name for f in self.features]

    def index(self, name: str) -> int:
        for i, f in enumerate(self.features):
            if f.name == name:
                return i
        raise DataError(f"feature {name!r} not in schema")

    def feature(self, name: str) -> Feature:
        return self.features[self.index(name)]

    def label_code(self, text: str) -> int:
        if text == self.positive_label:
            return 1
        if text == self.negative_label:
            return 0
        raise DataError(f"unknown class label {text!r}")

    def label_text(self, code: int) -> str:
        return self.positive_label if code == 1 else self.negative_label

    def replace_features(self, features: Iterable[Feature]) -> "Schema":
        return Schema(tuple(features), self.class_name, self.positive_label,
                      self.negative_label)


@dataclass(frozen=True)
class Instance:
    """One applicant: raw values in schema order plus ``good``/``bad`` label."""

    values: tuple[Value, ...]
    label: str | None = None


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    schema: Schema
    columns: tuple[np.ndarray, ...]
    y: np.ndarray

    def __post_init__(self):
        if len(self.columns) != len(self.schema.features):
            raise DataError("column count does not match schema")
        n = len(self.y)
        cols = []
        for f, col in zip(self.schema.features, self.columns):
            if len(col) != n:
                raise DataError(f"column {f.name!r} has wrong length")
            if f.is_numeric:
                col = np.asarray(col, dtype=np.float64)
            else:
                col = np.asarray(col, dtype=np.int64)
                if n and (col.min() < -1 or col.max() >= len(f.categories)):
                    raise DataError(f"column {f.name!r}: code outside domain")
            cols.append(_freeze(col))
        y = np.asarray(self.y, dtype=np.int64)
        if n and not np.isin(y, (0, 1)).all():
            raise DataError("labels must be 0 (bad) or 1 (good)")
        object.__setattr__(self, "columns", tuple(cols))
        object.__setattr__(self, "y", _freeze(y))

    def __len__(self) -> int:
        return len(self.y)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset) or self.schema != other.schema:
            return False
        if not np.array_equal(self.y, other.y):
            return False
        return all(np.array_equal(a, b, equal_nan=f.is_numeric)
                   for f, a, b in zip(self.schema.features, self.columns, other.columns))

    __hash__ = None

    def column(self, name: str) -> np.ndarray:
        return self.columns[self.schema.index(name)]

    def subset(self, rows) -> "Dataset":
        rows = np.asarray(rows)
        return Dataset(self.schema, tuple(c[rows] for c in self.columns), self.y[rows])

    def select(self, names: Sequence[str]) -> "Dataset":
        idx = [self.schema.index(n) for n in names]
        schema = self.schema.replace_features(self.schema.features[i] for i in idx)
        return Dataset(schema, tuple(self.columns[i] for i in idx), self.y)

    def select_group(self, group: str) -> "Dataset":
        """Restrict to one feature group; ``combined`` keeps everything."""
        if group == "combined":
            return self
        if group not in GROUPS:
            raise DataError(f"unknown feature group {group!r}")
        return self.select([f.name for f in self.schema.features if f.group == group])

    def instance(self, i: int) -> Instance:
        values: list[Value] = []
        for f, col in zip(self.schema.features, self.columns):
            v = col[i]
            if f.is_numeric:
                values.append(None if math.isnan(v) else float(v))
            else:
                values.append(None if v < 0 else f.categories[v])
        return Instance(tuple(values), GOOD if self.y[i] == 1 else BAD)

    @property
    def instances(self) -> list[Instance]:
        return [self.instance(i) for i in range(len(self))]

    @classmethod
    def from_instances(cls, schema: Schema, instances: Sequence[Instance]) -> "Dataset":
        cols = [encode_column(f, [inst.values[j] for inst in instances])
                for j, f in enumerate(schema.features)]
        y = [1 if inst.label == GOOD else 0 for inst in instances]
        return cls(schema, tuple(cols), np.asarray(y, dtype=np.int64))

    def fingerprint(self) -> str:
        """SHA-256 over the schema and the little-endian column bytes."""
        h = hashlib.sha256(format_schema_lossless(self.schema).encode())
        for col in (*self.columns, self.y):
            h.update(col.astype(col.dtype.newbyteorder("<"), copy=False).tobytes())
        return h.hexdigest()


def encode_column(f: Feature, values: Sequence[Value]) -> np.ndarray:
    if f.is_numeric:
        return np.array([np.nan if v is None else float(v) for v in values],
                         dtype=np.float64)
    lookup = {c: i for i, c in enumerate(f.categories)}
    try:
        return np.array([-1 if v is None else lookup[v] for v in values], dtype=np.int64)
    except KeyError as e:
        raise DataError(f"feature {f.name!r}: unknown category {e.args[0]!r}") from None


def encode_instance(schema: Schema, inst: Instance) -> list[np.ndarray]:
    """Encode a single instance into one-element columns."""
    if len(inst.values) != len(schema.features):
        raise DataError(f"instance has {len(inst.values)} values, "
                        f"schema has {len(schema.features)} features")
    return [encode_column(f, [v]) for f, v in zip(schema.features, inst.values)]


def class_counts(d: Dataset) -> tuple[int, int]:
    """Return ``(n_good, n_bad)``."""
    n_good = int(d.y.sum())
    return n_good, len(d) - n_good


# -- schema sidecar ---------------------------------------------------------

def parse_schema(text: str) -> Schema:
    """Parse the plain-text schema sidecar.

    One line per feature, ``name,kind,group[,cat1|cat2|...]``, plus a single
    ``class,<name>,<good_label>,<bad_label>`` line. Blank lines and lines
    starting with ``#`` are ignored.
    """
    features = []
    class_line = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if parts[0] == "class":
            if len(parts) != 4 or class_line is not None:
                raise DataError(f"schema line {lineno}: bad class line")
            class_line = parts[1:]
            continue
        if len(parts) not in (3, 4):
            raise DataError(f"schema line {lineno}: expected name,kind,group[,cats]")
        cats = tuple(parts[3].split("|")) if len(parts) == 4 else ()
        try:
            features.append(Feature(parts[0], parts[1], parts[2], cats))
        except DataError as e:
            raise DataError(f"schema line {lineno}: {e}") from None
    if class_line is None:
        raise DataError("schema has no class line")
    return Schema(tuple(features), *class_line)


def format_schema_lossless(schema: Schema) -> str:
    return repr((schema.class_name, schema.positive_label, schema.negative_label,
                 [(f.name, f.kind, f.group, f.categories) for f in schema.features]))


def format_schema(schema: Schema) -> str:
    lines = []
    for f in schema.features:
        for token in (f.name, *f.categories):
            if any(ch in token for ch in ",|\n") or token != token.strip():
                raise DataError(f"name {token!r} cannot be written to a schema sidecar")
        parts = [f.name, f.kind, f.group]
        if f.categories:
            parts.append("|".join(f.categories))
        lines.append(",".join(parts))
    lines.append(f"class,{schema.class_name},{schema.positive_label},{schema.negative_label}")
    return "\n".join(lines) + "\n"


# -- CSV ----------------------------------------------------------------------

@dataclass(frozen=True)
class RowError:
    row: int
    message: str

    def __str__(self):
        return f"row {self.row}: {self.message}"


def parse_csv_report(stream: TextIO, schema: Schema, missing_token: str = "?"
                     ) -> tuple[Dataset, list[RowError]]:
    """Parse CSV, collecting per-row errors instead of raising.

    Rows are numbered from 1 for the first data row. Every input row ends up
    either as an instance or as exactly one error.
    """
    reader = csv.reader(stream)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise DataError("empty CSV: no header row") from None
    expected = schema.names + [schema.class_name]
    if sorted(header) != sorted(expected) or len(set(header)) != len(header):
        raise DataError(f"CSV header {header} does not match schema columns {expected}")
    pos = [header.index(n) for n in expected]
    width = len(header)
    lookups = [{c: i for i, c in enumerate(f.categories)} for f in schema.features]

    rows: list[list] = [[] for _ in schema.features]
    labels: list[int] = []
    errors: list[RowError] = []
    for rowno, cells in enumerate(reader, 1):
        if not cells:
            errors.append(RowError(rowno, "empty row"))
            continue
        if len(cells) != width:
            errors.append(RowError(rowno, f"expected {width} cells, got {len(cells)}"))
            continue
        try:
            parsed = []
            for j, f in enumerate(schema.features):
                cell = cells[pos[j]].strip()
                if cell == "" or cell == missing_token:
                    parsed.append(np.nan if f.is_numeric else -1)
                elif f.is_numeric:
                    try:
                        parsed.append(float(cell))
                    except ValueError:
                        raise DataError(f"feature {f.name!r}: unparseable number {cell!r}")
                else:
                    if cell not in lookups[j]:
                        raise DataError(f"feature {f.name!r}: unknown category {cell!r}")
                    parsed.append(lookups[j][cell])
            label = cells[pos[-1]].strip()
            if label not in (schema.positive_label, schema.negative_label):
                raise DataError(f"unknown class label {label!r}")
        except DataError as e:
            errors.append(RowError(rowno, str(e)))
            continue
        for j, v in enumerate(parsed):
            rows[j].append(v)
        labels.append(schema.label_code(label))

    cols = tuple(np.asarray(r, dtype=np.float64 if f.is_numeric else np.int64)
                 for f, r in zip(schema.features, rows))
    return Dataset(schema, cols, np.asarray(labels, dtype=np.int64)), errors


def parse_csv(stream: TextIO, schema: Schema, missing_token: str = "?") -> Dataset:
    """Parse a header-rowed CSV into a :class:`Dataset`.

    Raises
    ------
    DataError
        Listing every offending row, if any row fails to parse.
    """
    d, errors = parse_csv_report(stream, schema, missing_token)
    if errors:
        shown = "; ".join(str(e) for e in errors[:10])
        more = f" (+{len(errors) - 10} more)" if len(errors) > 10 else ""
        raise DataError(f"{len(errors)} bad CSV row(s): {shown}{more}")
    return d


def format_number(x: float) -> str:
    """Shortest round-trip decimal, without a trailing ``.0``."""
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def to_csv(d: Dataset, missing_token: str = "?") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(d.schema.names + [d.schema.class_name])
    feats = d.schema.features
    for i in range(len(d)):
        row = []
        for f, col in zip(feats, d.columns):
            v = col[i]
            if f.is_numeric:
                row.append(missing_token if math.isnan(v) else format_number(v))
            else:
                row.append(missing_token if v < 0 else f.categories[v])
        row.append(d.schema.label_text(d.y[i]))
        w.writerow(row)
    return buf.getvalue()


# -- folds --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FoldAssignment:
    k: int
    assignment: np.ndarray = field(repr=False)

    def train_test(self, fold: int) -> tuple[np.ndarray, np.ndarray]:
        test = np.flatnonzero(self.assignment == fold)
        train = np.flatnonzero(self.assignment != fold)
        return train, test


def stratified_folds(d: Dataset, k: int, seed: int) -> FoldAssignment:
    """Shuffle each class with a seed-derived permutation, then deal round-robin.

    Only the labels and the seed influence the assignment.
    """
    if k < 2:
        raise DataError("fold count must be at least 2")
    n_good, n_bad = class_counts(d)
    if min(n_good, n_bad) < k:
        raise DataError(f"each class needs at least {k} instances "
                        f"(have {n_good} good, {n_bad} bad)")
    assignment = np.empty(len(d), dtype=np.int64)
    for cls in (1, 0):
        idx = np.flatnonzero(d.y == cls)
        perm = derive_rng(seed, "folds", cls).permutation(len(idx))
        assignment[idx[perm]] = np.arange(len(idx)) % k
    return FoldAssignment(k, _freeze(assignment))
