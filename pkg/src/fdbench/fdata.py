"""Data model for mixed scalar/functional observations.

A :class:`FunctionalDataset` holds N observations. Each scalar feature is an
N-vector, each functional feature an N x L matrix whose rows are curves
evaluated on a common grid. A :class:`Task` adds a target.

All arrays are stored read-only; datasets and tasks are safe to share
between workers.
"""
from __future__ import annotations

import contextvars
import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np


class FormatError(ValueError):
    """Malformed input file."""


class TaskError(ValueError):
    """Target or split constraints violated."""


def _frozen(a, dtype=np.float64):
    a = np.array(a, dtype=dtype, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class FunctionalFeature:
    name: str
    values: np.ndarray
    grid: np.ndarray = None

    def __post_init__(self):
        values = _frozen(self.values)
        if values.ndim != 2:
            raise ValueError(f"functional feature {self.name!r} must be an N x L matrix")
        if values.shape[1] < 2:
            raise ValueError(f"functional feature {self.name!r} needs at least 2 grid points")
        if not np.all(np.isfinite(values)):
            raise ValueError(f"functional feature {self.name!r} has missing or non-finite values")
        if self.grid is None:
            grid = _frozen(np.arange(1, values.shape[1] + 1))
        else:
            grid = _frozen(self.grid)
            if grid.shape != (values.shape[1],):
                raise ValueError(f"grid of {self.name!r} must have length {values.shape[1]}")
            if np.any(np.diff(grid) <= 0):
                raise ValueError(f"grid of {self.name!r} must be strictly increasing")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "grid", grid)

    @property
    def length(self):
        return self.values.shape[1]


@dataclass(frozen=True)
class FunctionalDataset:
    scalar_features: Mapping[str, np.ndarray] = field(default_factory=dict)
    functional_features: Sequence[FunctionalFeature] = ()

    def __post_init__(self):
        scalars = {name: _frozen(v) for name, v in dict(self.scalar_features).items()}
        functionals = tuple(self.functional_features)
        names = list(scalars) + [f.name for f in functionals]
        if len(set(names)) != len(names):
            raise ValueError("feature names must be unique across scalar and functional features")
        sizes = {len(v) for v in scalars.values()} | {f.values.shape[0] for f in functionals}
        if len(sizes) > 1:
            raise ValueError(f"features disagree on the number of observations: {sorted(sizes)}")
        for name, v in scalars.items():
            if v.ndim != 1:
                raise ValueError(f"scalar feature {name!r} must be a vector")
            if not np.all(np.isfinite(v)):
                raise ValueError(f"scalar feature {name!r} has missing or non-finite values")
        object.__setattr__(self, "scalar_features", scalars)
        object.__setattr__(self, "functional_features", functionals)

    @property
    def n_obs(self):
        for v in self.scalar_features.values():
            return len(v)
        for f in self.functional_features:
            return f.values.shape[0]
        return 0

    @property
    def functional_names(self):
        return [f.name for f in self.functional_features]

    def functional(self, name):
        for f in self.functional_features:
            if f.name == name:
                return f
        raise KeyError(f"no functional feature named {name!r}")

    def take(self, rows):
        """Sub-dataset of the given rows (order preserved)."""
        rows = np.asarray(rows, dtype=np.intp)
        return FunctionalDataset(
            {k: v[rows] for k, v in self.scalar_features.items()},
            [FunctionalFeature(f.name, f.values[rows], f.grid) for f in self.functional_features],
        )


# -- row access instrumentation ---------------------------------------------
#
# Every read of task rows goes through Task.take. Listeners registered here
# see (phase, task name, rows) and can assert that no test rows leak into
# fitting or tuning. ``phase`` is set by the resampling code.

access_phase: contextvars.ContextVar[str] = contextvars.ContextVar("access_phase", default="")
_access_listeners: list[Callable[[str, str, np.ndarray], None]] = []


def add_access_listener(fn):
    _access_listeners.append(fn)


def remove_access_listener(fn):
    _access_listeners.remove(fn)


@dataclass(frozen=True)
class Task:
    """Supervised task.

    For classification ``target`` holds integer codes ``0..C-1`` into
    ``levels``; levels keep their first-appearance order, which is also the
    label order used for tie-breaking.
    """

    name: str
    dataset: FunctionalDataset
    target: np.ndarray
    task_kind: str = "classification"
    levels: tuple = ()

    def __post_init__(self):
        if self.task_kind not in ("classification", "regression"):
            raise TaskError(f"unknown task kind {self.task_kind!r}")
        if self.task_kind == "classification":
            target = _frozen(self.target, dtype=np.intp)
            if not self.levels:
                raise TaskError("classification task needs class levels")
            counts = np.bincount(target, minlength=len(self.levels))
            if len(counts) != len(self.levels) or np.any(counts == 0):
                missing = [str(lv) for lv, c in zip(self.levels, counts) if c == 0]
                raise TaskError(f"every class must be represented; missing {missing}")
            if len(self.levels) < 2:
                raise TaskError(f"classification needs at least 2 classes, got {len(self.levels)}")
        else:
            target = _frozen(self.target)
        if len(target) != self.dataset.n_obs:
            raise TaskError(f"target has {len(target)} entries for {self.dataset.n_obs} observations")
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "levels", tuple(self.levels))

    @classmethod
    def classification(cls, name, dataset, labels):
        """Build a classification task from raw labels."""
        levels, codes = encode_labels(labels)
        return cls(name, dataset, codes, "classification", levels)

    @property
    def n_obs(self):
        return self.dataset.n_obs

    @property
    def n_classes(self):
        return len(self.levels)

    def take(self, rows):
        """Rows of the dataset and target; reported to access listeners."""
        rows = np.asarray(rows, dtype=np.intp)
        if rows.size and (rows.min() < 0 or rows.max() >= self.n_obs):
            raise IndexError("row index out of range")
        for fn in _access_listeners:
            fn(access_phase.get(), self.name, rows)
        return self.dataset.take(rows), self.target[rows]


def encode_labels(labels):
    """Map labels to codes in first-appearance order."""
    index = {}
    codes = np.empty(len(labels), dtype=np.intp)
    for i, lab in enumerate(labels):
        codes[i] = index.setdefault(lab, len(index))
    return tuple(index), codes


@dataclass(frozen=True)
class SplitIndex:
    """Train and test row indices; ``allow_overlap`` admits resubstitution splits."""

    train: np.ndarray
    test: np.ndarray
    allow_overlap: bool = False

    def __post_init__(self):
        train = _frozen(np.sort(self.train), dtype=np.intp)
        test = _frozen(np.sort(self.test), dtype=np.intp)
        if train.size == 0 or test.size == 0:
            raise TaskError("train and test sets must be non-empty")
        if not self.allow_overlap and np.intersect1d(train, test).size:
            raise TaskError("train and test sets overlap")
        object.__setattr__(self, "train", train)
        object.__setattr__(self, "test", test)

    def digest(self):
        """Short stable hash of the index sets."""
        import hashlib

        h = hashlib.sha1()
        h.update(self.train.astype("<i8").tobytes())
        h.update(b"|")
        h.update(self.test.astype("<i8").tobytes())
        return h.hexdigest()[:16]


# -- ingestion ----------------------------------------------------------------

def _split_line(line):
    if "\t" in line:
        return line.split("\t")
    if "," in line:
        return line.split(",")
    return line.split()


def _read_ucr_rows(path):
    labels, rows = [], []
    width = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = [f.strip() for f in _split_line(line)]
            if width is None:
                width = len(fields)
                if width < 3:
                    raise FormatError(f"{path}, line {lineno}: need a label and at least 2 values")
            elif len(fields) != width:
                raise FormatError(
                    f"{path}, line {lineno}: ragged row with {len(fields) - 1} values, expected {width - 1}"
                )
            try:
                values = [float(v) for v in fields[1:]]
            except ValueError as exc:
                raise FormatError(f"{path}, line {lineno}: non-numeric series value ({exc})") from None
            if not all(math.isfinite(v) for v in values):
                raise FormatError(f"{path}, line {lineno}: missing or non-finite value")
            labels.append(fields[0])
            rows.append(values)
    if not rows:
        raise FormatError(f"{path}: no observations")
    return labels, rows


def _resolve_ucr_paths(path):
    p = Path(path)
    if p.is_file():
        return [p]
    parts = [p.with_name(f"{p.name}_{s}.tsv") for s in ("TRAIN", "TEST")]
    found = [q for q in parts if q.is_file()]
    if found:
        return found
    if p.is_dir():
        found = [p / f"{p.name}_{s}.tsv" for s in ("TRAIN", "TEST")]
        found = [q for q in found if q.is_file()]
        if found:
            return found
    raise FileNotFoundError(f"no UCR file(s) found for {path}")


def load_ucr_tsv(*paths, name=None):
    """Load one or more UCR-format files into a single classification task.

    Each path may be a file, or a stem/directory ``X`` for which
    ``X_TRAIN.tsv`` and ``X_TEST.tsv`` exist; all rows are merged in order.
    The first field of every line is the class label, the rest the series.
    Tabs, commas and whitespace are accepted as separators.
    """
    files = [f for p in paths for f in _resolve_ucr_paths(p)]
    if not files:
        raise ValueError("no input paths given")
    labels, rows = [], []
    for f in files:
        lab, r = _read_ucr_rows(f)
        if rows and len(r[0]) != len(rows[0]):
            raise FormatError(f"{f}: series length {len(r[0])} differs from {len(rows[0])}")
        labels += lab
        rows += r
    if name is None:
        stem = files[0].stem
        name = stem.rsplit("_", 1)[0] if stem.endswith(("_TRAIN", "_TEST")) else stem
    if len(set(labels)) < 2:
        raise TaskError(f"{name}: need at least 2 classes, found {sorted(set(labels))}")
    dataset = FunctionalDataset({}, [FunctionalFeature("series", np.array(rows))])
    return Task.classification(name, dataset, labels)


def write_ucr_tsv(task, path, feature="series"):
    """Write a single-feature classification task in UCR layout (17 significant digits)."""
    values = task.dataset.functional(feature).values
    with open(path, "w", encoding="utf-8") as fh:
        for code, row in zip(task.target, values):
            fh.write("\t".join([str(task.levels[code])] + [format(v, ".17g") for v in row]))
            fh.write("\n")


def _column_span(span, columns):
    if isinstance(span, (tuple, list)) and len(span) == 2 and all(isinstance(s, int) for s in span):
        start, stop = span
        if not 1 <= start <= stop <= len(columns):
            raise ValueError(f"span {span} outside the table's {len(columns)} columns")
        return list(range(start - 1, stop))
    if isinstance(span, range):
        return [i - 1 for i in span]
    idx = {c: i for i, c in enumerate(columns)}
    try:
        return [idx[c] for c in span]
    except KeyError as exc:
        raise ValueError(f"unknown column {exc.args[0]!r}") from None


def make_functional_dataset(table, feature_ranges, exclude=()):
    """Group column spans of a table into functional features.

    ``table`` maps column names to equal-length columns (a dict or a pandas
    DataFrame). ``feature_ranges`` maps a feature name to a 1-based inclusive
    ``(start, stop)`` column span, a ``range``, or a list of column names.
    Remaining columns become scalar features unless listed in ``exclude``.
    """
    columns = list(table.keys()) if isinstance(table, Mapping) else list(table.columns)
    used = {}
    functionals = []
    for fname, span in feature_ranges.items():
        cols = _column_span(span, columns)
        if len(cols) < 2:
            raise ValueError(f"span of {fname!r} has width {len(cols)}; a curve needs at least 2 columns")
        for c in cols:
            if c in used:
                raise ValueError(f"spans of {used[c]!r} and {fname!r} overlap at column {c + 1}")
            used[c] = fname
        try:
            mat = np.column_stack([np.asarray(table[columns[c]], dtype=np.float64) for c in cols])
        except (TypeError, ValueError) as exc:
            raise ValueError(f"non-numeric column in span of {fname!r}: {exc}") from None
        functionals.append(FunctionalFeature(fname, mat))
    scalars = {}
    for i, col in enumerate(columns):
        if i in used or col in exclude:
            continue
        try:
            scalars[str(col)] = np.asarray(table[col], dtype=np.float64)
        except (TypeError, ValueError):
            raise ValueError(f"scalar column {col!r} is not numeric") from None
    return FunctionalDataset(scalars, functionals)


def load_csv_task(csv_path, sidecar_path=None, name=None):
    """Load a multi-feature CSV described by a JSON sidecar.

    The sidecar looks like::

        {"target": "heatan", "task_kind": "regression",
         "features": {"UVVIS": [3, 136], "NIR": [137, 367]}}

    Column ranges are 1-based and inclusive over the CSV columns.
    """
    csv_path = Path(csv_path)
    sidecar_path = Path(sidecar_path) if sidecar_path else csv_path.with_suffix(".json")
    meta = json.loads(sidecar_path.read_text(encoding="utf-8"))
    with open(csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [r for r in reader if r]
    for lineno, r in enumerate(rows, start=2):
        if len(r) != len(header):
            raise FormatError(f"{csv_path}, line {lineno}: expected {len(header)} fields, got {len(r)}")
    table = {h: [r[i] for r in rows] for i, h in enumerate(header)}
    target_col = meta["target"]
    if target_col not in table:
        raise FormatError(f"target column {target_col!r} not in {csv_path}")
    spans = {k: tuple(v) if isinstance(v, list) and len(v) == 2 and all(isinstance(x, int) for x in v) else v
             for k, v in meta.get("features", {}).items()}
    dataset = make_functional_dataset(table, spans, exclude=(target_col,))
    kind = meta.get("task_kind", "classification")
    name = name or meta.get("name") or csv_path.stem
    if kind == "classification":
        return Task.classification(name, dataset, table[target_col])
    return Task(name, dataset, np.asarray(table[target_col], dtype=np.float64), "regression")


def load_task(path, name=None):
    """Load a UCR file/stem or a CSV with JSON sidecar, by extension."""
    p = Path(path)
    if p.suffix.lower() == ".csv":
        return load_csv_task(p, name=name)
    return load_ucr_tsv(p, name=name)


# -- splits -------------------------------------------------------------------

def _labels_of(task_or_labels):
    if isinstance(task_or_labels, Task):
        if task_or_labels.task_kind != "classification":
            raise TaskError("stratification needs a classification task")
        return task_or_labels.target, task_or_labels.levels
    labels = np.asarray(task_or_labels)
    levels, codes = encode_labels(labels.tolist())
    return codes, levels


def stratified_train_counts(class_counts, train_fraction):
    """Per-class train sizes by largest-remainder apportionment.

    The total is ``round(N * fraction)``; every class keeps at least one
    member on each side.
    """
    counts = np.asarray(class_counts, dtype=np.int64)
    quotas = counts * train_fraction
    base = np.floor(quotas).astype(np.int64)
    total = int(round(float(counts.sum()) * train_fraction))
    extra = max(0, min(total - int(base.sum()), len(counts)))
    order = sorted(range(len(counts)), key=lambda c: (-(quotas[c] - base[c]), c))
    for c in order[:extra]:
        base[c] += 1
    return np.clip(base, 1, counts - 1)


def stratified_subsample(task, train_fraction, n_splits, seed):
    """Repeated stratified train/test subsampling.

    Deterministic given ``seed``; accepts a Task or a plain label vector.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    if n_splits < 1:
        raise ValueError("n_splits must be positive")
    codes, levels = _labels_of(task)
    counts = np.bincount(codes, minlength=len(levels))
    for lv, c in zip(levels, counts):
        if c < 2:
            raise TaskError(f"class {lv!r} has {c} member(s); stratified splitting needs at least 2")
    n_train = stratified_train_counts(counts, train_fraction)
    members = [np.flatnonzero(codes == c) for c in range(len(levels))]
    rng = np.random.default_rng(seed)
    splits = []
    for _ in range(n_splits):
        train, test = [], []
        for idx, k in zip(members, n_train):
            perm = rng.permutation(idx)
            train.append(perm[:k])
            test.append(perm[k:])
        splits.append(SplitIndex(np.concatenate(train), np.concatenate(test)))
    return splits


def kfold_stratified(labels, k, seed):
    """Stratified k-fold partition; returns one SplitIndex per fold (fold = test set).

    Members of each class are shuffled and dealt round-robin over the folds,
    continuing where the previous class stopped, so per-class and total fold
    sizes both differ by at most one.
    """
    codes, levels = _labels_of(labels)
    n = len(codes)
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of observations ({n})")
    rng = np.random.default_rng(seed)
    order = np.concatenate([rng.permutation(np.flatnonzero(codes == c)) for c in range(len(levels))])
    fold_of = np.empty(n, dtype=np.intp)
    fold_of[order] = np.arange(n) % k
    all_idx = np.arange(n)
    return [SplitIndex(all_idx[fold_of != f], all_idx[fold_of == f]) for f in range(k)]
