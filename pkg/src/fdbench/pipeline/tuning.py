"""Random search and surrogate-based (SMBO) tuning with inner cross-validation."""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from fdbench.fdata import access_phase, kfold_stratified
from fdbench.learn import ForestRegressor
from fdbench.pipeline.space import ParamSpace, preset_entries

STRATEGIES = ("random", "smbo")
FAILED_LOSS = 1.0
N_EI_CANDIDATES = 500
SURROGATE_TREES = 30
LOG_EPS = 1e-8


@dataclass
class TuneResult:
    best_params: dict
    best_inner_loss: float
    history: list = field(default_factory=list)  # (transformed params, loss, error or None)
    budget_used: int = 0

    @property
    def losses(self):
        return [h[1] for h in self.history]


def pipeline_space(pipeline, extractor_preset="paper-extractors", learner_preset="paper-learners"):
    """Joint space of a pipeline's extractor and learner entries from presets."""
    entries = []
    for scope, spec in pipeline.extractors.items():
        entries += [e.scoped(scope) for e in preset_entries(extractor_preset, spec.method)]
    entries += [e.scoped("learner") for e in preset_entries(learner_preset, pipeline.learner.method)]
    return ParamSpace(tuple(entries))


def expected_improvement(mean, var, best):
    sd = np.sqrt(np.maximum(var, 0.0))
    gain = best - mean
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(sd > 0, gain / sd, 0.0)
    ei = gain * norm.cdf(z) + sd * norm.pdf(z)
    return np.where(sd > 0, ei, np.maximum(gain, 0.0))


def minimize(objective, space, budget, strategy="smbo", seed=0, include_default=None):
    """Minimize ``objective(params)`` over ``space`` with ``budget`` evaluations.

    Objective failures are recorded with loss 1.0. SMBO starts from
    ``max(10, ceil(budget / 10))`` points (the all-defaults configuration
    first when every entry has a default), then proposes the expected
    improvement maximizer among 500 random candidates under a random-forest
    surrogate refit after every evaluation. The surrogate models
    ``log(loss + 1e-8)`` so that small differences near the optimum are not
    swamped by the spread of poor configurations. ``include_default``
    (default: on for smbo only) controls the default point.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; known: {STRATEGIES}")
    if include_default is None:
        include_default = strategy == "smbo"
    rng = np.random.default_rng(seed)
    raws, losses, history = [], [], []

    def evaluate(raw):
        params = space.transform(raw)
        try:
            loss, err = float(objective(params)), None
            if not math.isfinite(loss):
                loss, err = FAILED_LOSS, "non-finite loss"
        except Exception as exc:
            loss, err = FAILED_LOSS, f"{type(exc).__name__}: {exc}"
        raws.append(raw)
        losses.append(loss)
        history.append((params, loss, err))

    default = space.default_raw() if include_default else None
    n_init = budget if strategy == "random" else min(budget, max(10, math.ceil(budget / 10)))
    if default is not None:
        evaluate(default)
    while len(raws) < n_init:
        evaluate(space.sample_raw(rng))
    while len(raws) < budget:
        X = np.vstack([space.encode(r) for r in raws])
        y = np.array(losses)
        target = np.log(y - min(0.0, y.min()) + LOG_EPS)
        surrogate = ForestRegressor(SURROGATE_TREES, seed=int(rng.integers(2**32))).fit(X, target)
        cands = [space.sample_raw(rng) for _ in range(N_EI_CANDIDATES)]
        mean, var = surrogate.predict(np.vstack([space.encode(c) for c in cands]), return_var=True)
        ei = expected_improvement(mean, var, target.min())
        evaluate(cands[int(np.argmax(ei))])
    best = int(np.argmin(losses))
    return TuneResult(history[best][0], losses[best], history, len(history))


def inner_cv_loss(pipeline, task, train, params, inner_k=3, seed=0):
    """Mean MMCE of ``pipeline.with_params(params)`` over stratified folds of ``train``."""
    from fdbench.resample import mmce

    train = np.asarray(train)
    configured = pipeline.with_params(params)
    folds = kfold_stratified(task.target[train], inner_k, seed)
    losses = []
    for fold in folds:
        pred = configured.fit_predict(task, train[fold.train], train[fold.test])
        losses.append(mmce(task.target[train[fold.test]], pred))
    return float(np.mean(losses))


def tune(pipeline, task, train, space, budget=100, inner_k=3, strategy="smbo", seed=0):
    """Tune on the rows ``train`` only; every candidate shares the same inner folds."""
    token = access_phase.set("tune")
    try:
        return minimize(lambda params: inner_cv_loss(pipeline, task, train, params, inner_k, seed),
                        space, budget, strategy, seed)
    finally:
        access_phase.reset(token)
