"""Pipeline orchestration, sweeps and comparison tables."""

from src.fpdtrack.pipeline.config import PipelineConfig, seed_from_settings
from src.fpdtrack.pipeline.runner import (
    PipelineInputs,
    PipelineResult,
    evaluate_fused,
    execute,
    load_inputs,
    run_batch,
    run_pipeline,
    stage,
    write_artifacts,
)
from src.fpdtrack.pipeline.sweep import (
    SWEEP_PARAMS,
    ComparisonTable,
    ScoreRow,
    StageConfigs,
    SweepTable,
    ablation,
    ablation_inputs,
    compare,
    compare_inputs,
    summarize,
    summarize_results,
    sweep,
    sweep_inputs,
)

__all__ = [
    "PipelineConfig",
    "seed_from_settings",
    "PipelineInputs",
    "PipelineResult",
    "evaluate_fused",
    "execute",
    "load_inputs",
    "run_batch",
    "run_pipeline",
    "stage",
    "write_artifacts",
    "SWEEP_PARAMS",
    "ComparisonTable",
    "ScoreRow",
    "StageConfigs",
    "SweepTable",
    "ablation",
    "ablation_inputs",
    "compare",
    "compare_inputs",
    "summarize",
    "summarize_results",
    "sweep",
    "sweep_inputs",
]
