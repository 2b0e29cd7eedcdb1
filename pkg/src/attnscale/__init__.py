"""Dot-product attention with alternative softmax rescalings, plus a Monte Carlo
harness measuring how each rescaling distorts attention weight distributions."""

__version__ = "0.1.0"

from .attention import (
    KEY_LENGTH_SUM,
    MEAN_KEY_LENGTH,
    N_SQRT_DIM,
    RMS_KEY_NORM,
    SQRT_DIM,
    UNSCALED,
    AttentionError,
    DimensionMismatchError,
    KeySet,
    NonPositiveScaleError,
    RuleKind,
    ScalingRule,
    ZeroScaleError,
    batch_attention,
    combine_values,
    dot_attention,
    prescaled_softmax,
    rescaled_vector_attention,
    scaling_constant,
    vector_attention,
)
from .gradients import gradient_norm, saturation_fraction, softmax_jacobian
from .simulation import (
    RAW_SCORES,
    ExperimentConfig,
    ExperimentResult,
    Normal,
    Uniform,
    run_experiment,
    sample_vector,
)
from .stats import DegenerateSampleError, kde, shape_distortion, shape_summary

__all__ = [
    "KEY_LENGTH_SUM", "MEAN_KEY_LENGTH", "N_SQRT_DIM", "RMS_KEY_NORM", "SQRT_DIM", "UNSCALED",
    "AttentionError", "DimensionMismatchError", "KeySet", "NonPositiveScaleError", "RuleKind",
    "ScalingRule", "ZeroScaleError", "batch_attention", "combine_values", "dot_attention",
    "prescaled_softmax", "rescaled_vector_attention", "scaling_constant", "vector_attention",
    "gradient_norm", "saturation_fraction", "softmax_jacobian",
    "RAW_SCORES", "ExperimentConfig", "ExperimentResult", "Normal", "Uniform", "run_experiment",
    "sample_vector",
    "DegenerateSampleError", "kde", "shape_distortion", "shape_summary",
]
