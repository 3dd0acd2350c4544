"""TAP-Vid evaluation: Jaccard, Average Jaccard and per-category scores."""

from src.fpdtrack.metrics.jaccard import (
    DEFAULT_THRESHOLDS,
    MetricsConfig,
    MetricsReport,
    ThresholdRecord,
    average_jaccard,
    evaluation_mask,
    jaccard_at,
)
from src.fpdtrack.metrics.categories import (
    CATEGORIES,
    GroundTruthLabels,
    category_masks,
    category_scores,
    mean_skipping_none,
)
from src.fpdtrack.metrics.batch import DatasetReport, evaluate_directory, pair_track_files

__all__ = [
    "DEFAULT_THRESHOLDS",
    "MetricsConfig",
    "MetricsReport",
    "ThresholdRecord",
    "average_jaccard",
    "evaluation_mask",
    "jaccard_at",
    "CATEGORIES",
    "GroundTruthLabels",
    "category_masks",
    "category_scores",
    "mean_skipping_none",
    "DatasetReport",
    "evaluate_directory",
    "pair_track_files",
]
