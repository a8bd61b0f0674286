"""Hyperparameter spaces, value transformations and the shipped presets."""
import math
from dataclasses import dataclass, field

import numpy as np

KINDS = ("real", "integer", "categorical")
TRAFOS = ("identity", "pow2", "powp", "nodesize")


def apply_trafo(x, trafo, p=None, n=None):
    """Map a raw sampled value to the value the consumer sees.

    ``pow2`` is ``2**x``, ``powp`` is ``p**x`` (p = number of features) and
    ``nodesize`` is ``2**(log2(n) * x)`` (n = number of training rows).
    """
    if trafo == "identity":
        return x
    if trafo == "pow2":
        return 2.0 ** x
    if trafo == "powp":
        if p is None:
            raise ValueError("powp needs the feature count p")
        return float(p) ** x
    if trafo == "nodesize":
        if n is None:
            raise ValueError("nodesize needs the row count n")
        return 2.0 ** (math.log2(n) * x)
    raise ValueError(f"unknown trafo {trafo!r}; known: {TRAFOS}")


@dataclass(frozen=True)
class Param:
    """One tunable entry.

    ``id`` is ``<scope>.<name>`` where scope is a functional feature name,
    ``*`` (every functional feature) or ``learner``. Bounds and ``default``
    are on the raw scale. A None default means the consumer's own default.
    """

    id: str
    kind: str
    lower: float = None
    upper: float = None
    values: tuple = ()
    default: object = None
    trafo: str = "identity"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"{self.id}: unknown kind {self.kind!r}")
        if self.trafo not in TRAFOS:
            raise ValueError(f"{self.id}: unknown trafo {self.trafo!r}")
        if self.kind == "categorical":
            if not self.values:
                raise ValueError(f"{self.id}: categorical entry needs values")
            object.__setattr__(self, "values", tuple(self.values))
            if self.default is not None and self.default not in self.values:
                raise ValueError(f"{self.id}: default {self.default!r} not among {self.values}")
        else:
            if self.lower is None or self.upper is None or not self.lower <= self.upper:
                raise ValueError(f"{self.id}: invalid range [{self.lower}, {self.upper}]")
            if self.default is not None and not self.lower <= self.default <= self.upper:
                raise ValueError(f"{self.id}: default {self.default} outside [{self.lower}, {self.upper}]")

    @property
    def scope(self):
        return self.id.rsplit(".", 1)[0]

    @property
    def name(self):
        return self.id.rsplit(".", 1)[1]

    def sample(self, rng):
        if self.kind == "categorical":
            return self.values[int(rng.integers(len(self.values)))]
        if self.kind == "integer":
            return int(rng.integers(int(self.lower), int(self.upper) + 1))
        return float(rng.uniform(self.lower, self.upper))

    def transform(self, raw):
        # powp and nodesize depend on the fitted data (feature count, train
        # size); the forest applies them itself, so they pass through raw here
        if self.trafo in ("identity", "powp", "nodesize"):
            return raw
        return apply_trafo(raw, self.trafo)

    def encode(self, raw):
        """Unit-scale numeric encoding (one-hot for categoricals)."""
        if self.kind == "categorical":
            return [1.0 if raw == v else 0.0 for v in self.values]
        span = self.upper - self.lower
        return [0.0 if span == 0 else (raw - self.lower) / span]

    def scoped(self, scope):
        return Param(f"{scope}.{self.name}", self.kind, self.lower, self.upper, self.values, self.default, self.trafo)


@dataclass(frozen=True)
class ParamSpace:
    entries: tuple = field(default_factory=tuple)

    def __post_init__(self):
        entries = tuple(self.entries)
        ids = [e.id for e in entries]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate parameter ids in {ids}")
        object.__setattr__(self, "entries", entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def ids(self):
        return [e.id for e in self.entries]

    def __add__(self, other):
        return ParamSpace(self.entries + other.entries)

    def sample_raw(self, rng):
        return {e.id: e.sample(rng) for e in self.entries}

    def transform(self, raw):
        return {e.id: e.transform(raw[e.id]) for e in self.entries if e.id in raw}

    def default_raw(self):
        """Raw defaults, or None when any entry lacks one."""
        if any(e.default is None for e in self.entries):
            return None
        return {e.id: e.default for e in self.entries}

    def encode(self, raw):
        return np.array([v for e in self.entries for v in e.encode(raw[e.id])])


def sample_params(space, rng):
    """Uniform draw in the raw ranges, transformed for the consumer."""
    if not len(space):
        raise ValueError("cannot sample from an empty parameter space")
    return space.transform(space.sample_raw(rng))


# -- presets --------------------------------------------------------------------
#
# Extractor and learner spaces keyed by method, with entry names equal to the
# consumer's parameter names. Table ids are kept alongside for reference.

WAVELET_FILTERS_LISTED = ("d4", "d8", "d20", "la8", "la20", "bl14", "bl20", "c6", "c24")

PAPER_EXTRACTORS = {
    "bsignal": (
        Param("bsignal.knots", "integer", 3, 500, default=10),
        Param("bsignal.df", "integer", 1, 10, default=3),
    ),
    "multires": (
        Param("multires.res_level", "integer", 2, 5),
        Param("multires.shift", "real", 0.01, 1.0),
    ),
    "pca": (Param("pca.rank", "integer", 1, 30),),
    "wavelets": (
        # only d4 and d8 of the listed filters are implemented
        Param("wavelets.filter", "categorical", values=("d4", "d8")),
        Param("wavelets.boundary", "categorical", values=("periodic", "reflection")),
    ),
    "fourier": (Param("fourier.trafo_coeff", "categorical", values=("phase", "amplitude")),),
    "dtwkernel": (
        Param("dtwkernel.ref_method", "categorical", values=("random", "all"), default="random"),
        Param("dtwkernel.n_refs", "real", 0.0, 1.0),
        Param("dtwkernel.window", "real", 0.0, 1.0),
    ),
}

PAPER_LEARNERS = {
    "forest": (
        Param("forest.mtry_power", "real", 0.0, 1.0, trafo="powp"),
        Param("forest.min_node_size_exp", "real", 0.0, 0.99, trafo="nodesize"),
        Param("forest.sample_fraction", "real", 0.1, 1.0),
    ),
    # listed for learners that are not implemented here; no consumer
    "ksvm": (
        Param("ksvm.C", "real", -15, 15, trafo="pow2"),
        Param("ksvm.sigma", "real", -15, 10, trafo="pow2"),
    ),
    "xgboost": (
        Param("xgboost.nrounds", "integer", 1, 5000, default=100),
        Param("xgboost.eta", "real", -10, 0, trafo="pow2"),
        Param("xgboost.subsample", "real", 0.1, 1.0),
        Param("xgboost.booster", "categorical", values=("gbtree", "gblinear")),
        Param("xgboost.max_depth", "integer", 1, 15),
        Param("xgboost.min_child_weight", "real", 0, 7, trafo="pow2"),
        Param("xgboost.colsample_bytree", "real", 0.0, 1.0),
        Param("xgboost.colsample_bylevel", "real", 0.0, 1.0),
        Param("xgboost.lambda", "real", -10, 10, trafo="pow2"),
        Param("xgboost.alpha", "real", -10, 10, trafo="pow2"),
    ),
    "FDboost": (
        Param("FDboost.mstop", "integer", 1, 5000, default=100),
        Param("FDboost.nu", "real", 0.0, 1.0, default=0.01),
        Param("FDboost.df", "real", 1, 5, default=4),
        Param("FDboost.knots", "integer", 5, 100, default=10),
        Param("FDboost.degree", "integer", 1, 4, default=3),
    ),
}

LOCAL_LEARNERS = {
    "knn": (
        Param("knn.k", "integer", 1, 10, default=1),
        Param("knn.window", "real", 0.0, 1.0, default=1.0),
    ),
    "kernel_np": (
        Param("kernel_np.bandwidth", "real", -10, 10, default=0, trafo="pow2"),
        Param("kernel_np.window", "real", 0.0, 1.0, default=1.0),
    ),
    "fglm": (
        Param("fglm.knots", "integer", 5, 100, default=10),
        Param("fglm.lam", "real", -15, 5, default=math.log2(1e-3), trafo="pow2"),
    ),
    "tree": (
        Param("tree.max_depth", "integer", 1, 30, default=30),
        Param("tree.min_node_size", "integer", 2, 50, default=2),
    ),
}
LOCAL_LEARNERS["forest"] = PAPER_LEARNERS["forest"]

PRESETS = {
    "paper-extractors": PAPER_EXTRACTORS,
    "paper-learners": PAPER_LEARNERS,
    "local-learners": LOCAL_LEARNERS,
}


def preset_entries(preset, method):
    """Entries of ``preset`` for ``method`` (empty if the preset has none)."""
    try:
        table = PRESETS[preset]
    except KeyError:
        raise ValueError(f"unknown preset {preset!r}; known: {sorted(PRESETS)}") from None
    return table.get(method, ())


def param_from_dict(d):
    """Build a Param from a config mapping (``id``, ``type``, ``range``/``values``, ...)."""
    kind = d.get("type", d.get("kind"))
    lower, upper = (d.get("range") or (d.get("lower"), d.get("upper")))
    return Param(d["id"], kind, lower, upper, tuple(d.get("values", ())), d.get("default"),
                 d.get("trafo", "identity"))
