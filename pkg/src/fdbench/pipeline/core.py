"""Extractor + learner pipelines fitted on training rows only."""
from dataclasses import dataclass, field, replace

import numpy as np

from fdbench.extract import make_extractor
from fdbench.learn import make_learner

ALL_FEATURES = "*"


class PipelineError(RuntimeError):
    """Failure inside a pipeline stage; ``stage`` names it."""

    def __init__(self, stage, cause):
        super().__init__(f"{stage}: {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class ExtractorSpec:
    method: str
    params: dict = field(default_factory=dict)

    def build(self):
        return make_extractor(self.method, **self.params)


@dataclass(frozen=True)
class LearnerSpec:
    method: str
    params: dict = field(default_factory=dict)

    def build(self):
        return make_learner(self.method, **self.params)


@dataclass(frozen=True)
class Pipeline:
    """One extractor per functional feature fused with a learner.

    ``extractors`` maps functional feature names (or ``*`` for all of them)
    to specs. Unmapped functional features are dropped unless
    ``unmapped="raw"``, which flattens them to raw columns. Scalar features
    are appended when ``include_scalars`` is set.
    """

    extractors: dict
    learner: LearnerSpec
    include_scalars: bool = False
    unmapped: str = "drop"
    name: str = ""

    def __post_init__(self):
        if self.unmapped not in ("drop", "raw"):
            raise ValueError(f"unmapped must be 'drop' or 'raw', got {self.unmapped!r}")

    def resolve(self, dataset):
        """Feature name -> ExtractorSpec for the features this pipeline uses."""
        names = dataset.functional_names
        unknown = [k for k in self.extractors if k != ALL_FEATURES and k not in names]
        if unknown:
            raise ValueError(f"pipeline maps unknown functional features {unknown}")
        out = {}
        for name in names:
            spec = self.extractors.get(name, self.extractors.get(ALL_FEATURES))
            if spec is None and self.unmapped == "raw":
                spec = ExtractorSpec("raw")
            if spec is not None:
                out[name] = spec
        return out

    def with_params(self, assignment):
        """Copy with ``<feature>.<param>`` / ``learner.<param>`` values set."""
        extractors = {k: ExtractorSpec(v.method, dict(v.params)) for k, v in self.extractors.items()}
        learner = LearnerSpec(self.learner.method, dict(self.learner.params))
        for key, value in assignment.items():
            scope, pname = key.rsplit(".", 1)
            if scope == "learner":
                learner.params[pname] = value
            elif scope in extractors:
                extractors[scope].params[pname] = value
            else:
                raise KeyError(f"parameter {key!r} targets no stage of this pipeline")
        return replace(self, extractors=extractors, learner=learner)

    def fit(self, task, train):
        dataset, y = task.take(train)
        fitted = {}
        blocks = []
        for name, spec in self.resolve(dataset).items():
            stage = f"extract[{name}:{spec.method}]"
            feat = dataset.functional(name)
            try:
                ext = spec.build().fit(feat.values, feat.grid)
                blocks.append(ext.transform(feat.values, prefix=f"{name}.").values)
            except Exception as exc:
                raise PipelineError(stage, exc) from exc
            fitted[name] = ext
        scalars = sorted(dataset.scalar_features) if self.include_scalars else []
        X = _assemble(blocks, dataset, scalars)
        if X.shape[1] == 0:
            raise PipelineError("assemble", ValueError("pipeline produces no features"))
        try:
            learner = self.learner.build().fit(X, y)
        except Exception as exc:
            raise PipelineError(f"learner[{self.learner.method}]", exc) from exc
        return FittedPipeline(self, fitted, scalars, learner)

    def fit_predict(self, task, train, test):
        return self.fit(task, train).predict(task, test)


def _assemble(blocks, dataset, scalars):
    cols = blocks + [dataset.scalar_features[s][:, None] for s in scalars]
    if not cols:
        return np.zeros((dataset.n_obs, 0))
    return np.hstack(cols)


@dataclass
class FittedPipeline:
    pipeline: Pipeline
    extractors: dict
    scalars: list
    learner: object

    @property
    def width(self):
        return self.learner.n_features_

    def transform(self, dataset):
        blocks = []
        for name, ext in self.extractors.items():
            try:
                blocks.append(ext.transform(dataset.functional(name).values).values)
            except Exception as exc:
                raise PipelineError(f"extract[{name}:{ext.method}]", exc) from exc
        return _assemble(blocks, dataset, self.scalars)

    def predict(self, task, rows):
        dataset, _ = task.take(rows)
        X = self.transform(dataset)
        try:
            return self.learner.predict(X)
        except Exception as exc:
            raise PipelineError(f"learner[{self.learner.method}]", exc) from exc
