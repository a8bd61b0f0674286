"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` or as
``python tests/test_acceptance.py``.
"""
import cmath
import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest
import yaml

import oracles
from fdbench.bench import aggregate_ranks, dataset_ranks, load_config
from fdbench.dtw import dtw_cost, dtw_distance
from fdbench.extract import BsignalExtractor, bspline_basis, extract_fourier, extract_wavelets
from fdbench.fdata import (
    add_access_listener,
    kfold_stratified,
    load_task,
    remove_access_listener,
    stratified_subsample,
)
from fdbench.pipeline import ExtractorSpec, LearnerSpec, Param, ParamSpace, Pipeline, minimize, pipeline_space
from fdbench.resample import nested_resample, resample

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "data" / "ucr"


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


# 1. banded DTW against path-enumeration oracles ------------------------------------

def test_01_dtw_oracle_equivalence(report):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    mismatches, window_violations, exhaustive = 0, 0, 0
    for _ in range(200):
        n, m = rng.integers(1, 17, size=2)
        a, b = rng.normal(size=n), rng.normal(size=m)
        full = dtw_cost(a, b, band=None)
        if n <= 6 and m <= 6:
            ref = oracles.dtw_exhaustive(a.tolist(), b.tolist())
            exhaustive += 1
        else:
            ref = oracles.dtw_recursive(a.tolist(), b.tolist())
        mismatches += full != ref
        d_full = dtw_distance(a, b, window=1.0)
        for w in np.linspace(0.0, 1.0, 11):
            window_violations += dtw_distance(a, b, window=w) < d_full
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and window_violations == 0 and elapsed < 5.0
    report(1, ok, f"200 pairs ({exhaustive} fully enumerated), {mismatches} mismatches, "
                  f"{window_violations} window violations, {elapsed:.2f} s")


# 2. Fourier against a naive DFT ----------------------------------------------------

def test_02_fourier_oracle_equivalence(report):
    rng = np.random.default_rng(7)
    worst_amp = worst_phase = 0.0
    for _ in range(100):
        L = int(rng.integers(8, 65))
        x = rng.normal(size=L)
        amp = extract_fourier(x[None, :], "amplitude").values[0]
        phase = extract_fourier(x[None, :], "phase").values[0]
        dft = oracles.naive_dft(x.tolist())
        for k in range(L // 2 + 1):
            worst_amp = max(worst_amp, abs(amp[k] - abs(dft[k])))
            if abs(dft[k]) > 1e-6:
                diff = cmath.phase(cmath.exp(1j * (phase[k] - cmath.phase(dft[k]))))
                worst_phase = max(worst_phase, abs(diff))
    ok = worst_amp <= 1e-9 and worst_phase <= 1e-9
    report(2, ok, f"100 series, max |amplitude err| {worst_amp:.1e}, max |phase err| {worst_phase:.1e}")


# 3. wavelet energy and the Haar matrix ---------------------------------------------

def test_03_wavelet_energy(report):
    rng = np.random.default_rng(3)
    worst = 0.0
    for i in range(100):
        name = ("haar", "d4", "d8")[i % 3]
        L = int(2 ** rng.integers(3, 9))
        x = rng.normal(size=(1, L))
        c = extract_wavelets(x, name, "periodic").values
        worst = max(worst, abs((c ** 2).sum() - (x ** 2).sum()))
    haar = extract_wavelets(np.array([[1.0, 2.0, 3.0, 4.0]]), "haar").values[0]
    haar_err = float(np.abs(haar - oracles.haar_matrix(4) @ np.array([1.0, 2.0, 3.0, 4.0])).max())
    ok = worst <= 1e-9 and haar_err <= 1e-12
    report(3, ok, f"max energy gap {worst:.1e} over 100 series, Haar matrix gap {haar_err:.1e}")


# 4. B-spline partition of unity ----------------------------------------------------

def test_04_bspline_partition_of_unity(report):
    worst_sum = worst_const = 0.0
    checked = []
    for knots in (3, 10, 50):
        for L in (32, 128):
            B = bspline_basis(np.arange(1.0, L + 1), knots)
            worst_sum = max(worst_sum, float(np.abs(B.sum(axis=1) - 1.0).max()))
            if knots < L - 1:
                ext = BsignalExtractor(knots, 3).fit(np.zeros((1, L)))
                rec = ext.reconstruct(ext.transform(np.full((1, L), 2.5)).values)
                worst_const = max(worst_const, float(np.abs(rec - 2.5).max()))
                checked.append((knots, L))
    ok = worst_sum <= 1e-9 and worst_const <= 1e-6
    report(4, ok, f"max |row sum - 1| {worst_sum:.1e}; constant reconstruction gap {worst_const:.1e} "
                  f"on {len(checked)} feasible (knots, L) pairs")


# 5. no outer-test reads during tune or fit -----------------------------------------

def test_05_nested_resample_leakage(report):
    task = load_task(DATA / "GunPoint")
    plan = stratified_subsample(task, 0.25, 5, 11)
    pipe = Pipeline({"*": ExtractorSpec("pca")}, LearnerSpec("knn"))
    space = pipeline_space(pipe, learner_preset="local-learners")
    log = []

    def listener(phase, name, rows):
        log.append((phase, rows.copy()))

    add_access_listener(listener)
    try:
        res = nested_resample(pipe, task, plan, space, budget=5, strategy="smbo", seed=0)
    finally:
        remove_access_listener(listener)
    split_no, prev, leaks, reads = -1, None, 0, {"tune": 0, "fit": 0, "predict": 0}
    for phase, rows in log:
        if phase == "tune" and prev != "tune":
            split_no += 1
        reads[phase] += 1
        if phase in ("tune", "fit"):
            leaks += np.intersect1d(rows, plan[split_no].test).size
        prev = phase
    ok = leaks == 0 and split_no == 4 and res.n_failed == 0 and reads["tune"] > 0 and reads["fit"] > 0
    report(5, ok, f"5 outer splits, budget 5: {reads['tune']} tune reads, {reads['fit']} fit reads, "
                  f"{leaks} outer-test rows touched")


# 6. stratification bounds ----------------------------------------------------------

def test_06_stratification(report):
    rng = np.random.default_rng(6)
    violations, tried = 0, 0
    while tried < 1000:
        C = int(rng.integers(2, 6))
        counts = rng.integers(2, 40, size=C)
        f = float(rng.uniform(0.05, 0.95))
        if np.any(counts * f < 1) or np.any(counts * (1 - f) < 1):
            continue
        tried += 1
        labels = np.repeat(np.arange(C), counts)
        rng.shuffle(labels)
        split = stratified_subsample(labels.tolist(), f, 1, tried)[0]
        t = np.bincount(labels[split.train], minlength=C)
        share = t / counts
        if (np.any(t < 1) or np.any(t > counts - 1) or np.any(np.abs(share - f) > 1 / counts)
                or np.any(np.abs(share - t.sum() / counts.sum()) > 1 / counts)):
            violations += 1
        k = int(rng.integers(2, min(6, counts.sum()) + 1))
        folds = kfold_stratified(labels.tolist(), k, tried)
        tests = np.concatenate([fd.test for fd in folds])
        if sorted(tests.tolist()) != list(range(len(labels))):
            violations += 1
        for c in range(C):
            per_fold = [np.count_nonzero(labels[fd.test] == c) for fd in folds]
            if max(per_fold) - min(per_fold) > 1:
                violations += 1
    gunpoint = stratified_subsample(load_task(DATA / "GunPoint"), 0.25, 20, 0)
    sizes = {len(s.train) for s in gunpoint}
    ok = violations == 0 and sizes == {50}
    report(6, ok, f"1000 label vectors, {violations} bound violations; GunPoint@0.25 train sizes {sorted(sizes)}")


# 7. small-scale benchmark ------------------------------------------------------------

@pytest.mark.slow
def test_07_small_benchmark(report):
    config = load_config(ROOT / "configs" / "small.yaml")
    pc = next(p for p in config.pipelines if p.id == "knn_dtw_default")
    t0 = time.perf_counter()
    lines, ok = [], True
    for ds in config.datasets:
        task = load_task(ds.path, name=ds.name)
        plan = stratified_subsample(task, ds.split_fraction, 20, config.seed)
        res = resample(pc.pipeline, task, plan)
        acc = float(np.mean([r.accuracy for r in res.per_split]))
        base = float(np.mean([np.bincount(task.target[s.test]).max() / len(s.test) for s in plan]))
        ok &= res.n_failed == 0 and acc > base and (ds.name != "GunPoint" or acc >= 0.80)
        lines.append(f"{ds.name} {acc:.3f} (baseline {base:.3f})")
        # cross-check a slice of the first split against the exhaustive-scan reference
        split = plan[0]
        rows = split.test[:8] if task.dataset.functional("series").length > 100 else split.test[:60]
        X = task.dataset.functional("series").values
        ref = oracles.one_nn_dtw(X[split.train], task.target[split.train], X[rows])
        got = pc.pipeline.fit(task, split.train).predict(task, rows)
        ok &= bool(np.array_equal(ref, got))
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 600
    report(7, ok, f"knn_dtw_default, 20 splits: {'; '.join(lines)}; reference agrees; {elapsed:.0f} s")


# 8. tuning benefit -------------------------------------------------------------------

TUNE_SPACE = ParamSpace((
    Param("learner.a", "real", 0.0, 1.0, default=0.5),
    Param("learner.b", "real", -5.0, 5.0, default=0.0),
))


def synthetic_inner_loss(params):
    """Inner loss surface with its optimum at a=0.7, b=2."""
    return 0.05 + 0.4 * (params["learner.a"] - 0.7) ** 2 + 0.02 * (params["learner.b"] - 2.0) ** 2


def test_08_tuning_benefit(report):
    default = synthetic_inner_loss(TUNE_SPACE.transform(TUNE_SPACE.default_raw()))
    wins, beats_default = 0, 0
    for seed in range(20):
        smbo = minimize(synthetic_inner_loss, TUNE_SPACE, 30, "smbo", seed).best_inner_loss
        rand = minimize(synthetic_inner_loss, TUNE_SPACE, 30, "random", seed).best_inner_loss
        wins += smbo <= rand
        beats_default += smbo <= default
    ok = wins >= 15 and beats_default == 20
    report(8, ok, f"smbo <= random in {wins}/20 seeds; tuned <= default in {beats_default}/20")


# 9. rank arithmetic ------------------------------------------------------------------

def test_09_rank_arithmetic(report):
    from test_bench import ranks_fixture

    ties = dataset_ranks({"A": 0.9, "B": 0.9, "C": 0.7})
    target = [10, 12.5, 13, 15, 14, 11, 13.5, 12, 16, 12]
    avg, per = aggregate_ranks(ranks_fixture(target))
    sums_ok = all(math.fsum(r.values()) == len(r) * (len(r) + 1) / 2 for r in per.values())
    ok = ties == {"A": 1.5, "B": 1.5, "C": 3.0} and avg["X"] == 12.90 and sums_ok
    report(9, ok, f"ties {ties}; fixture average {avg['X']}; rank sums n(n+1)/2: {sums_ok}")


# 10. determinism and resume ----------------------------------------------------------

def test_10_determinism_and_resume(report, tmp_path):
    doc = yaml.safe_load((ROOT / "configs" / "smoke.yaml").read_text())
    for d in doc["datasets"]:
        d["path"] = str(DATA / Path(d["path"]).name)
    doc["workers"] = 2
    outputs = []
    for run in ("first", "second"):
        doc["output_dir"] = str(tmp_path / run)
        cfg = tmp_path / f"{run}.yaml"
        cfg.write_text(yaml.safe_dump(doc))
        proc = subprocess.run([sys.executable, "-m", "fdbench.cli", "run", "--config", str(cfg)],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outputs.append((tmp_path / run / "records.csv").read_bytes())
    resumed = subprocess.run([sys.executable, "-m", "fdbench.cli", "run", "--config", str(cfg), "--resume"],
                             capture_output=True, text=True)
    identical = outputs[0] == outputs[1]
    zero = resumed.returncode == 0 and " 0 jobs executed" in resumed.stdout
    unchanged = (tmp_path / "second" / "records.csv").read_bytes() == outputs[1]
    ok = identical and zero and unchanged
    report(10, ok, f"records.csv byte-identical: {identical}; resume: {resumed.stdout.strip()}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
