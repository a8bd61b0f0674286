"""Benchmark orchestration: configs, job execution with resume, and aggregation."""
import csv
import json
import logging
import math
import multiprocessing as mp
import os
import re
import time
import warnings
from dataclasses import dataclass, field
from multiprocessing.connection import wait
from pathlib import Path

import numpy as np
import yaml
from scipy.stats import rankdata

from fdbench import __version__
from fdbench.extract import EXTRACTORS
from fdbench.fdata import load_task, stratified_subsample
from fdbench.learn import LEARNERS
from fdbench.pipeline import (
    ALL_FEATURES,
    ExtractorSpec,
    LearnerSpec,
    ParamSpace,
    Pipeline,
    param_from_dict,
    pipeline_space,
    preset_entries,
)
from fdbench.pipeline.space import PRESETS
from fdbench.resample import nested_resample, resample

log = logging.getLogger(__name__)

RECORD_FIELDS = ["dataset", "pipeline", "split", "split_hash", "mmce", "accuracy", "status"]
TIMING_FIELDS = ["dataset", "pipeline", "split", "fit_seconds", "predict_seconds", "tune_seconds", "seconds"]
LONG_FIELDS = ["dataset", "pipeline", "mean_accuracy", "sd_accuracy", "rank", "percent_of_max"]
RAW_ALIASES = ("none", "raw")


class ConfigError(ValueError):
    pass


# -- configuration ----------------------------------------------------------------

@dataclass(frozen=True)
class DatasetConfig:
    name: str
    path: str
    split_fraction: float
    n_splits: int = 20


@dataclass(frozen=True)
class PipelineConfig:
    id: str
    pipeline: Pipeline
    tuned: bool = False
    space: ParamSpace = None
    budget: int = 100
    strategy: str = "smbo"
    inner_k: int = 3


@dataclass
class BenchmarkConfig:
    datasets: list
    pipelines: list
    seed: int = 0
    workers: int = 1
    output_dir: str = "results"
    timeout: float = 300.0
    source: dict = field(default_factory=dict)


def _extractor_spec(entry, where):
    if isinstance(entry, str):
        method, params = ("raw" if entry in RAW_ALIASES else entry), {}
    elif isinstance(entry, dict) and "method" in entry:
        method = "raw" if entry["method"] in RAW_ALIASES else entry["method"]
        params = dict(entry.get("params") or {})
    else:
        raise ConfigError(f"{where}: extractor must be a method name or a mapping with 'method'")
    if method not in EXTRACTORS:
        raise ConfigError(f"{where}: unknown extraction method {method!r}; known: {sorted(EXTRACTORS)}")
    spec = ExtractorSpec(method, params)
    try:
        spec.build()
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None
    return spec


def _extractor_map(entry, where):
    if entry is None or isinstance(entry, str) or (isinstance(entry, dict) and "method" in entry):
        return {ALL_FEATURES: _extractor_spec(entry or "raw", where)}
    if isinstance(entry, dict):
        return {feat: _extractor_spec(sub, f"{where}[{feat}]") for feat, sub in entry.items()}
    raise ConfigError(f"{where}: cannot parse extractor entry {entry!r}")


def _learner_spec(entry, where):
    if isinstance(entry, str):
        entry = {"method": entry}
    if not isinstance(entry, dict) or "method" not in entry:
        raise ConfigError(f"{where}: learner must be a method name or a mapping with 'method'")
    if entry["method"] not in LEARNERS:
        raise ConfigError(f"{where}: unknown learner {entry['method']!r}; known: {sorted(LEARNERS)}")
    spec = LearnerSpec(entry["method"], dict(entry.get("params") or {}))
    try:
        spec.build()
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None
    return spec


def _space(pipeline, entry, where):
    entry = entry or {}
    ext_preset = entry.get("extractors", "paper-extractors")
    lrn_preset = entry.get("learners")
    if lrn_preset is None:
        has_paper = bool(preset_entries("paper-learners", pipeline.learner.method))
        lrn_preset = "paper-learners" if has_paper else "local-learners"
    for preset in (ext_preset, lrn_preset):
        if preset not in PRESETS:
            raise ConfigError(f"{where}: unknown preset {preset!r}; known: {sorted(PRESETS)}")
    space = pipeline_space(pipeline, ext_preset, lrn_preset)
    entries = {e.id: e for e in space}
    try:
        for d in entry.get("entries", ()):
            p = param_from_dict(d)
            entries[p.id] = p
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: bad space entry: {exc}") from None
    return ParamSpace(tuple(entries.values()))


def parse_config(doc, base_dir="."):
    """Validate a config mapping; relative paths resolve against ``base_dir``."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a mapping")
    base = Path(base_dir)
    datasets = []
    for i, d in enumerate(doc.get("datasets") or []):
        where = f"datasets[{i}]"
        try:
            name, path, frac = d["name"], d["path"], float(d["split_fraction"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{where}: needs name, path and split_fraction ({exc})") from None
        if not 0.0 < frac < 1.0:
            raise ConfigError(f"{where}: split_fraction must lie in (0, 1), got {frac}")
        n_splits = int(d.get("n_splits", 20))
        if n_splits < 1:
            raise ConfigError(f"{where}: n_splits must be positive")
        datasets.append(DatasetConfig(name, os.path.normpath(base / path), frac, n_splits))
    if not datasets:
        raise ConfigError("config lists no datasets")
    if len({d.name for d in datasets}) != len(datasets):
        raise ConfigError("dataset names must be unique")

    pipelines = []
    for i, p in enumerate(doc.get("pipelines") or []):
        where = f"pipelines[{i}]"
        if not isinstance(p, dict) or "id" not in p or "learner" not in p:
            raise ConfigError(f"{where}: needs id and learner")
        pipe = Pipeline(_extractor_map(p.get("extractor"), where), _learner_spec(p["learner"], where),
                        include_scalars=bool(p.get("include_scalars", False)),
                        unmapped=p.get("unmapped", "drop"), name=str(p["id"]))
        tuned = bool(p.get("tuned", False))
        space = _space(pipe, p.get("space"), where) if tuned else None
        if tuned and not len(space):
            raise ConfigError(f"{where}: tuned pipeline has an empty parameter space")
        strategy = p.get("strategy", "smbo")
        if strategy not in ("random", "smbo"):
            raise ConfigError(f"{where}: unknown strategy {strategy!r}")
        budget, inner_k = int(p.get("budget", 100)), int(p.get("inner_k", 3))
        if budget < 1 or inner_k < 2:
            raise ConfigError(f"{where}: budget must be >= 1 and inner_k >= 2")
        pipelines.append(PipelineConfig(str(p["id"]), pipe, tuned, space, budget, strategy, inner_k))
    if not pipelines:
        raise ConfigError("config lists no pipelines")
    ids = [p.id for p in pipelines]
    if len(set(ids)) != len(ids):
        raise ConfigError(f"pipeline ids must be unique: {ids}")

    workers = int(doc.get("workers", 1))
    timeout = doc.get("timeout", 300.0)
    if workers < 1:
        raise ConfigError("workers must be at least 1")
    if timeout is not None and float(timeout) <= 0:
        raise ConfigError("timeout must be positive")
    return BenchmarkConfig(datasets, pipelines, int(doc.get("seed", 0)), workers,
                           os.path.normpath(base / doc.get("output_dir", "results")),
                           None if timeout is None else float(timeout), doc)


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        doc = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (ValueError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None
    return parse_config(doc, path.parent)


# -- results ----------------------------------------------------------------------

@dataclass
class BenchmarkResult:
    records: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    seed: int = 0
    n_executed: int = 0

    def sorted_records(self):
        return sorted(self.records, key=lambda r: (r["dataset"], r["pipeline"], r["split"]))

    def accuracy_table(self):
        """``{dataset: {pipeline: [accuracies of completed splits]}}``."""
        table = {}
        for r in self.sorted_records():
            if r["status"] == "ok":
                table.setdefault(r["dataset"], {}).setdefault(r["pipeline"], []).append(r["accuracy"])
        return table

    def mean_accuracy(self):
        return {d: {p: math.fsum(v) / len(v) for p, v in ps.items()}
                for d, ps in self.accuracy_table().items()}

    @property
    def partial_failure(self):
        return bool(self.failures) or any(r["status"] != "ok" for r in self.records)


def dataset_ranks(accuracies):
    """Ranks of pipelines on one dataset (1 = best, average over ties)."""
    names = sorted(accuracies)
    r = rankdata([-accuracies[n] for n in names], method="average")
    return dict(zip(names, (float(x) for x in r)))


def aggregate_ranks(result):
    """Average rank per pipeline across datasets.

    ``result`` is a BenchmarkResult or ``{dataset: {pipeline: accuracy}}``.
    Pipelines missing on some dataset are excluded with a warning. Returns
    ``(average_ranks, per_dataset_ranks)``.
    """
    means = result.mean_accuracy() if isinstance(result, BenchmarkResult) else result
    if not means:
        return {}, {}
    pipelines = set.union(*(set(v) for v in means.values()))
    complete = set.intersection(*(set(v) for v in means.values()))
    dropped = sorted(pipelines - complete)
    if dropped:
        warnings.warn(f"excluded from ranking (missing on some datasets): {dropped}", stacklevel=2)
    per_dataset = {d: dataset_ranks({p: acc[p] for p in complete}) for d, acc in sorted(means.items())}
    avg = {p: math.fsum(r[p] for r in per_dataset.values()) / len(per_dataset) for p in sorted(complete)}
    return avg, per_dataset


def percent_of_max(result):
    """Accuracy over the best accuracy on each dataset.

    Returns ``(per_dataset, per_pipeline_mean)``. A dataset whose best
    accuracy is 0 yields fractions of 0 with a warning.
    """
    means = result.mean_accuracy() if isinstance(result, BenchmarkResult) else result
    per_dataset = {}
    for d, acc in sorted(means.items()):
        best = max(acc.values())
        if best == 0:
            warnings.warn(f"maximum accuracy on {d} is 0; fractions set to 0", stacklevel=2)
            per_dataset[d] = {p: 0.0 for p in acc}
        else:
            per_dataset[d] = {p: a / best for p, a in acc.items()}
    collected = {}
    for fr in per_dataset.values():
        for p, v in fr.items():
            collected.setdefault(p, []).append(v)
    return per_dataset, {p: math.fsum(v) / len(v) for p, v in sorted(collected.items())}


def aggregates(result):
    table = result.accuracy_table()
    means = result.mean_accuracy()
    sds = {d: {p: float(np.std(v, ddof=1)) if len(v) > 1 else 0.0 for p, v in ps.items()}
           for d, ps in table.items()}
    avg_ranks, ranks = aggregate_ranks(means)
    pom, pom_mean = percent_of_max(means)
    return {"mean_accuracy": means, "sd_accuracy": sds, "ranks": ranks, "average_rank": avg_ranks,
            "percent_of_max": pom, "percent_of_max_mean": pom_mean}


def _fmt(v):
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def export_results(result, out_dir, formats=("csv", "json")):
    """Write records/timings CSVs, a plot-ready long CSV and an aggregates JSON."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        records = result.sorted_records()
        written = []
        if "csv" in formats:
            written.append(_write_csv(out / "records.csv", RECORD_FIELDS, records))
            written.append(_write_csv(out / "timings.csv", TIMING_FIELDS, records))
            agg = aggregates(result)
            long_rows = [
                {"dataset": d, "pipeline": p, "mean_accuracy": m, "sd_accuracy": agg["sd_accuracy"][d][p],
                 "rank": agg["ranks"].get(d, {}).get(p, float("nan")),
                 "percent_of_max": agg["percent_of_max"][d][p]}
                for d, ps in sorted(agg["mean_accuracy"].items()) for p, m in sorted(ps.items())
            ]
            written.append(_write_csv(out / "accuracy_long.csv", LONG_FIELDS, long_rows))
        if "json" in formats:
            doc = aggregates(result)
            doc.update({"failures": result.failures, "config": result.config, "seed": result.seed,
                        "version": __version__})
            path = out / "aggregates.json"
            path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=str))
            written.append(path)
    except OSError as exc:
        raise OSError(f"cannot write results to {exc.filename or out}: {exc.strerror or exc}") from exc
    return written


def _write_csv(path, fields, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(fields)
        for r in rows:
            w.writerow([_fmt(r[k]) for k in fields])
    return path


def read_records(path):
    """Records from a ``records.csv`` written by export_results."""
    path = Path(path)
    if path.is_dir():
        path = path / "records.csv"
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            row["split"] = int(row["split"])
            row["mmce"] = float(row["mmce"])
            row["accuracy"] = float(row["accuracy"])
            out.append(row)
    return BenchmarkResult(records=out)


# -- execution --------------------------------------------------------------------

def _job_file(out_dir, dataset, pipeline):
    safe = re.sub(r"[^A-Za-z0-9_.-]", "_", f"{dataset}__{pipeline}")
    return Path(out_dir) / "jobs" / f"{safe}.json"


def run_job(task, plan, pc, seed):
    """Resample one pipeline on one dataset's shared outer plan."""
    if pc.tuned:
        res = nested_resample(pc.pipeline, task, plan, pc.space, pc.budget, pc.inner_k, pc.strategy, seed)
    else:
        res = resample(pc.pipeline, task, plan)
    return [
        {"split": r.split, "split_hash": r.split_hash, "mmce": r.mmce, "accuracy": r.accuracy,
         "status": r.status, "error": r.error, "params": r.params, "fit_seconds": r.fit_seconds,
         "predict_seconds": r.predict_seconds, "tune_seconds": r.tune_seconds,
         "seconds": r.fit_seconds + r.predict_seconds + r.tune_seconds}
        for r in res.per_split
    ]


def _child(conn, task, plan, pc, seed):
    try:
        conn.send(("ok", run_job(task, plan, pc, seed)))
    except Exception as exc:
        conn.send(("error", f"{type(exc).__name__}: {exc}"))
    finally:
        conn.close()


def _run_pool(jobs, workers, timeout, on_done):
    """Run ``jobs`` (key, task, plan, pc, seed) in worker processes with a per-job timeout."""
    ctx = mp.get_context("fork" if "fork" in mp.get_all_start_methods() else "spawn")
    pending = list(jobs)
    running = {}
    while pending or running:
        while pending and len(running) < workers:
            key, *args = pending.pop(0)
            recv, send = ctx.Pipe(duplex=False)
            proc = ctx.Process(target=_child, args=(send, *args), daemon=True)
            proc.start()
            send.close()
            running[recv] = (key, proc, time.monotonic())
        for conn in wait(list(running), timeout=0.2):
            key, proc, _ = running.pop(conn)
            try:
                status, payload = conn.recv()
            except EOFError:
                status, payload = "error", f"worker exited with code {proc.exitcode}"
            proc.join()
            on_done(key, status, payload)
        if timeout is not None:
            now = time.monotonic()
            for conn, (key, proc, start) in list(running.items()):
                if now - start > timeout:
                    proc.terminate()
                    proc.join()
                    del running[conn]
                    on_done(key, "error", f"timed out after {timeout:g} s")


def run_benchmark(config, workers=None, seed=None, resume=False, in_process=None):
    """Run every (dataset, pipeline) job and write results to ``config.output_dir``.

    Each dataset gets one outer plan shared by all pipelines. Finished jobs
    are persisted under ``jobs/``; with ``resume`` those are loaded instead
    of re-run. Jobs run in worker processes (killed after ``timeout``)
    unless ``in_process`` is set, which is also the default for one worker
    without a timeout.
    """
    workers = config.workers if workers is None else workers
    seed = config.seed if seed is None else seed
    out = Path(config.output_dir)
    job_dir = out / "jobs"
    if not resume and job_dir.exists():
        for f in job_dir.glob("*.json"):
            f.unlink()
    job_dir.mkdir(parents=True, exist_ok=True)
    if in_process is None:
        in_process = workers == 1 and config.timeout is None

    result = BenchmarkResult(config=config.source, seed=seed)
    todo = []
    for ds in config.datasets:
        missing = [pc for pc in config.pipelines if not _job_file(out, ds.name, pc.id).exists()]
        for pc in config.pipelines:
            if pc not in missing:
                doc = json.loads(_job_file(out, ds.name, pc.id).read_text())
                result.records.extend(doc["records"])
        if not missing:
            continue
        try:
            task = load_task(ds.path, name=ds.name)
            plan = stratified_subsample(task, ds.split_fraction, ds.n_splits, seed)
        except Exception as exc:
            reason = f"{type(exc).__name__}: {exc}"
            log.warning("skipping dataset %s: %s", ds.name, reason)
            result.failures.extend({"dataset": ds.name, "pipeline": pc.id, "reason": reason} for pc in missing)
            continue
        todo.extend(((ds.name, pc.id), task, plan, pc, seed) for pc in missing)

    def on_done(key, status, payload):
        dataset, pipeline = key
        result.n_executed += 1
        if status != "ok":
            log.warning("job %s/%s failed: %s", dataset, pipeline, payload)
            result.failures.append({"dataset": dataset, "pipeline": pipeline, "reason": payload})
            return
        recs = [{"dataset": dataset, "pipeline": pipeline, **r} for r in payload]
        result.records.extend(recs)
        path = _job_file(out, dataset, pipeline)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps({"records": recs}, sort_keys=True, default=str))
        os.replace(tmp, path)

    if in_process:
        for key, *args in todo:
            try:
                on_done(key, "ok", run_job(*args))
            except Exception as exc:
                on_done(key, "error", f"{type(exc).__name__}: {exc}")
    else:
        _run_pool(todo, workers, config.timeout, on_done)

    export_results(result, out)
    return result
