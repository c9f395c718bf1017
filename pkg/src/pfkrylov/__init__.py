"""Kernel Krylov estimation of Perron-Frobenius operators and abnormality scoring."""

__version__ = "0.1.0"

from .embedding import EmbeddingPlan, MeasureGram, cross_gram, measure_gram, split_indices
from .estimator import ARDetector, KrylovAbnormalityDetector
from .exceptions import (
    ARFitError,
    BreakdownError,
    IllConditionedShiftError,
    InputError,
    NumericalError,
)
from .kernels import KernelFamily, KernelSpec, eval_kernel, gram_block, median_bandwidth
from .krylov import (
    Method,
    OperatorEstimate,
    WeightScheme,
    arnoldi_estimate,
    qr_from_gram,
    shift_invert_estimate,
    weight_gram,
)
from .predictor import AbnormalityTrace, abnormality, project_feature, score_series

__all__ = [
    "ARDetector",
    "ARFitError",
    "AbnormalityTrace",
    "BreakdownError",
    "EmbeddingPlan",
    "IllConditionedShiftError",
    "InputError",
    "KernelFamily",
    "KernelSpec",
    "KrylovAbnormalityDetector",
    "MeasureGram",
    "Method",
    "NumericalError",
    "OperatorEstimate",
    "WeightScheme",
    "abnormality",
    "arnoldi_estimate",
    "cross_gram",
    "eval_kernel",
    "gram_block",
    "measure_gram",
    "median_bandwidth",
    "project_feature",
    "qr_from_gram",
    "score_series",
    "shift_invert_estimate",
    "split_indices",
    "weight_gram",
]
