"""Extractor-learner pipelines, parameter spaces and tuning."""
from fdbench.pipeline.core import (
    ALL_FEATURES,
    ExtractorSpec,
    FittedPipeline,
    LearnerSpec,
    Pipeline,
    PipelineError,
)
from fdbench.pipeline.space import (
    PRESETS,
    Param,
    ParamSpace,
    apply_trafo,
    param_from_dict,
    preset_entries,
    sample_params,
)
from fdbench.pipeline.tuning import (
    TuneResult,
    expected_improvement,
    inner_cv_loss,
    minimize,
    pipeline_space,
    tune,
)

__all__ = [
    "ALL_FEATURES",
    "PRESETS",
    "ExtractorSpec",
    "FittedPipeline",
    "LearnerSpec",
    "Param",
    "ParamSpace",
    "Pipeline",
    "PipelineError",
    "TuneResult",
    "apply_trafo",
    "expected_improvement",
    "inner_cv_loss",
    "minimize",
    "param_from_dict",
    "pipeline_space",
    "preset_entries",
    "sample_params",
    "tune",
]
