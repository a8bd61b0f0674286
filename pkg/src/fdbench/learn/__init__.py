"""Classifiers on extracted features or raw curves."""
from fdbench.learn.base import Learner, learner_from_json, vote
from fdbench.learn.fglm import FGLMClassifier, FGLMConvergenceError, fit_logistic_irls
from fdbench.learn.forest import (
    ForestClassifier,
    ForestRegressor,
    mtry_from_power,
    node_size_from_exp,
)
from fdbench.learn.neighbors import KernelNPClassifier, KNNClassifier, Semimetric
from fdbench.learn.tree import TreeClassifier, TreeRegressor

LEARNERS = {
    cls.method: cls
    for cls in (KNNClassifier, KernelNPClassifier, FGLMClassifier, TreeClassifier, ForestClassifier)
}


def make_learner(method, **params):
    try:
        cls = LEARNERS[method]
    except KeyError:
        raise ValueError(f"unknown learner {method!r}; known: {sorted(LEARNERS)}") from None
    return cls(**params)


__all__ = [
    "LEARNERS",
    "FGLMClassifier",
    "FGLMConvergenceError",
    "ForestClassifier",
    "ForestRegressor",
    "KNNClassifier",
    "KernelNPClassifier",
    "Learner",
    "Semimetric",
    "TreeClassifier",
    "TreeRegressor",
    "fit_logistic_irls",
    "learner_from_json",
    "make_learner",
    "mtry_from_power",
    "node_size_from_exp",
    "vote",
]
