"""Resampled evaluation: outer splits, nested tuning and the MMCE measure."""
import csv
import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from fdbench.fdata import access_phase

MEASURES = ("mmce", "accuracy", "train_time_seconds")


def mmce(truth, pred):
    """Mean misclassification error."""
    truth = np.asarray(truth)
    pred = np.asarray(pred)
    if truth.shape != pred.shape:
        raise ValueError(f"truth and prediction lengths differ: {truth.shape} vs {pred.shape}")
    if truth.size == 0:
        raise ValueError("mmce of an empty prediction set")
    return float(np.count_nonzero(truth != pred)) / truth.size


def accuracy(truth, pred):
    return 1.0 - mmce(truth, pred)


@dataclass
class SplitRecord:
    split: int
    split_hash: str
    mmce: float = float("nan")
    accuracy: float = float("nan")
    fit_seconds: float = 0.0
    predict_seconds: float = 0.0
    tune_seconds: float = 0.0
    params: dict = field(default_factory=dict)
    status: str = "ok"
    error: str = ""

    @property
    def train_time_seconds(self):
        return self.fit_seconds + self.tune_seconds


CSV_FIELDS = ["split", "split_hash", "mmce", "accuracy", "fit_seconds", "predict_seconds",
              "tune_seconds", "status", "error", "params"]


@dataclass
class ResampleResult:
    per_split: list

    def __post_init__(self):
        self.per_split = sorted(self.per_split, key=lambda r: r.split)

    @property
    def completed(self):
        return [r for r in self.per_split if r.status == "ok"]

    @property
    def n_failed(self):
        return len(self.per_split) - len(self.completed)

    def aggregate(self):
        """Mean and sample sd per measure over completed splits."""
        out = {"n_splits": len(self.per_split), "n_failed": self.n_failed}
        done = self.completed
        for m in MEASURES:
            vals = np.array([getattr(r, m) for r in done], dtype=np.float64)
            out[m] = {
                "mean": float(vals.mean()) if len(vals) else float("nan"),
                "sd": float(vals.std(ddof=1)) if len(vals) > 1 else 0.0,
            }
        return out

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_FIELDS)
            for r in self.per_split:
                row = asdict(r)
                row["params"] = json.dumps(r.params, sort_keys=True)
                w.writerow([row[k] for k in CSV_FIELDS])

    def to_json(self, path=None):
        doc = {"per_split": [asdict(r) for r in self.per_split], "aggregate": self.aggregate()}
        text = json.dumps(doc, indent=2, sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def _with_phase(phase, fn, *args):
    token = access_phase.set(phase)
    try:
        return fn(*args)
    finally:
        access_phase.reset(token)


def _evaluate_split(pipeline, task, split_id, split, tuner=None):
    rec = SplitRecord(split_id, split.digest())
    try:
        if tuner is not None:
            t0 = time.perf_counter()
            result = tuner(split.train)
            rec.tune_seconds = time.perf_counter() - t0
            rec.params = dict(result.best_params)
            pipeline = pipeline.with_params(result.best_params)
        t0 = time.perf_counter()
        fitted = _with_phase("fit", pipeline.fit, task, split.train)
        rec.fit_seconds = time.perf_counter() - t0
        t0 = time.perf_counter()
        pred = _with_phase("predict", fitted.predict, task, split.test)
        rec.predict_seconds = time.perf_counter() - t0
        rec.mmce = mmce(task.target[split.test], pred)
        rec.accuracy = 1.0 - rec.mmce
    except Exception as exc:
        rec.status = "failed"
        rec.error = f"{type(exc).__name__}: {exc}"
    return rec


def resample(pipeline, task, plan):
    """Fit on each split's train rows and score its test rows.

    Failures are recorded per split and excluded from the aggregate.
    """
    if not plan:
        raise ValueError("resampling plan is empty")
    return ResampleResult([_evaluate_split(pipeline, task, i, s) for i, s in enumerate(plan)])


def nested_resample(pipeline, task, plan, space, budget=100, inner_k=3, strategy="smbo", seed=0):
    """Tune on each outer train set, refit the best parameters there and score the outer test set.

    Every outer split uses the same tuning seed, so inner folds and the
    candidate stream depend only on the outer train rows.
    """
    from fdbench.pipeline import tune

    if not plan:
        raise ValueError("resampling plan is empty")

    def tuner(train):
        return tune(pipeline, task, train, space, budget, inner_k, strategy, seed)

    return ResampleResult([_evaluate_split(pipeline, task, i, s, tuner) for i, s in enumerate(plan)])
