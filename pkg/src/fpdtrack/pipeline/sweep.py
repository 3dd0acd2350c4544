"""Parameter sensitivity sweeps, source-vs-fused comparison and ablation tables.

A sweep computes each video's SSIM profile and point deviations once and
re-applies only the thresholds per value. Results are identical to running
the full pipeline with that value.

The ablation adds one component at a time on top of the base source (the
policy's static-camera static source): MPD point replacement applied to
every video with camera motion detection bypassed, then the full pipeline
with camera-dependent trajectory correction.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from src.fpdtrack.correction.dtc import fuse_with_flags
from src.fpdtrack.errors import ConfigError
from src.fpdtrack.metrics.categories import CATEGORIES, category_scores, mean_skipping_none
from src.fpdtrack.metrics.jaccard import MetricsConfig, average_jaccard
from src.fpdtrack.perception.mcmd import CameraMotionResult, McmdConfig, classify_profile, compute_ssim_profile
from src.fpdtrack.perception.mpd import (
    MpdConfig,
    PointDeviations,
    compute_deviations,
    detect_static_points,
    flags_from_deviations,
)
from src.fpdtrack.pipeline.config import PipelineConfig
from src.fpdtrack.pipeline.runner import (
    PipelineInputs,
    PipelineResult,
    evaluate_fused,
    execute,
    load_inputs,
    stage,
)
from src.fpdtrack.runtime import parallel_map
from src.fpdtrack.tracks.models import TrackSet

logger = logging.getLogger(__name__)

SWEEP_PARAMS = ("rho", "lambda_coarse", "lambda_fine", "eta")
FUSED_LABEL = "fpd"
MPD_ONLY_LABEL = "+mpd"
FULL_LABEL = "+dtc"


@dataclass(frozen=True)
class StageConfigs:
    """The per-video knobs a sweep varies."""
    mcmd: McmdConfig = field(default_factory=McmdConfig)
    mpd: MpdConfig = field(default_factory=MpdConfig)
    metrics: MetricsConfig = field(default_factory=MetricsConfig)

    @classmethod
    def from_config(cls, cfg: PipelineConfig) -> "StageConfigs":
        return cls(mcmd=cfg.mcmd, mpd=cfg.mpd, metrics=cfg.metrics)

    def with_param(self, param: str, value: float) -> "StageConfigs":
        if param == "rho":
            updated = replace(self, mpd=replace(self.mpd, rho=float(value)))
        elif param in SWEEP_PARAMS:
            updated = replace(self, mcmd=replace(self.mcmd, **{param: float(value)}))
        else:
            raise ConfigError(f"unknown sweep parameter '{param}' (expected one of {', '.join(SWEEP_PARAMS)})")
        updated.mcmd.validate()
        updated.mpd.validate()
        return updated


@dataclass(frozen=True)
class ScoreRow:
    """One table row: unweighted per-video means."""
    key: str
    sc_sp: float | None
    sc_mp: float | None
    mc_mp: float | None
    aj: float
    num_static: int | None = None

    def cells(self) -> list[str]:
        def fmt(v: float | None) -> str:
            return "" if v is None else repr(float(v))
        return [fmt(self.sc_sp), fmt(self.sc_mp), fmt(self.mc_mp), fmt(self.aj)]


def summarize(
    key: str,
    averages: Sequence[float],
    categories: Sequence[dict[str, float | None] | None],
    num_static: int | None = None,
) -> ScoreRow:
    """Aggregate per-video scores; a category absent from a video is skipped."""
    per_category = {
        name: mean_skipping_none([c.get(name) if c else None for c in categories]) for name in CATEGORIES
    }
    return ScoreRow(
        key=key,
        sc_sp=per_category["sc_sp"],
        sc_mp=per_category["sc_mp"],
        mc_mp=per_category["mc_mp"],
        aj=float(np.mean(averages)),
        num_static=num_static,
    )


def summarize_results(key: str, results: Sequence[PipelineResult]) -> ScoreRow:
    """Row for a list of evaluated pipeline results."""
    if any(r.metrics is None for r in results):
        raise ConfigError("every video needs ground truth to be scored")
    return summarize(
        key,
        [r.metrics.average_jaccard for r in results],
        [r.categories for r in results],
        num_static=sum(r.flags.num_static for r in results if r.flags is not None),
    )


@dataclass(frozen=True)
class SweepTable:
    param: str
    values: tuple[float, ...]
    rows: tuple[ScoreRow, ...]
    results: tuple[tuple[PipelineResult, ...], ...]  # [value][video]

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow([self.param, "sc_sp_aj", "sc_mp_aj", "mc_mp_aj", "aj", "num_static"])
        for value, row in zip(self.values, self.rows):
            writer.writerow([repr(float(value)), *row.cells(), row.num_static])
        return buffer.getvalue()


@dataclass(frozen=True)
class ComparisonTable:
    rows: tuple[ScoreRow, ...]

    def row(self, key: str) -> ScoreRow:
        for row in self.rows:
            if row.key == key:
                return row
        raise KeyError(key)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["method", "sc_sp_aj", "sc_mp_aj", "mc_mp_aj", "aj"])
        for row in self.rows:
            writer.writerow([row.key, *row.cells()])
        return buffer.getvalue()


def _sweep_video(
    inputs: PipelineInputs,
    base: StageConfigs,
    param: str,
    values: Sequence[float],
    threads: int | None,
) -> list[PipelineResult]:
    with stage("mcmd"):
        profile = compute_ssim_profile(inputs.video, base.mcmd, threads)
    deviations: PointDeviations | None = None
    results = []
    for value in values:
        configs = base.with_param(param, value)
        with stage("mcmd"):
            camera = classify_profile(profile, configs.mcmd)
        flags = None
        if not camera.moving:
            with stage("mpd"):
                if deviations is None:
                    deviations = compute_deviations(inputs.sources[inputs.policy.mpd_reference_source])
                flags = flags_from_deviations(deviations, configs.mpd)
        with stage("dtc"):
            fused = fuse_with_flags(inputs.sources, camera, inputs.policy, flags)
        report, categories = evaluate_fused(fused, inputs.ground_truth, inputs.labels, configs.metrics)
        logger.debug("%s %s=%g: AJ %.4f", inputs.name, param, value, report.average_jaccard)
        results.append(PipelineResult(inputs.name, fused, camera, flags, report, categories))
    return results


def sweep_inputs(
    suite: Sequence[tuple[PipelineInputs, StageConfigs]],
    param: str,
    values: Sequence[float],
    threads: int | None = None,
) -> SweepTable:
    """Sweep ``param`` over ``values`` on decoded videos."""
    values = tuple(float(v) for v in values)
    if len(values) < 2:
        raise ConfigError("sweep needs ≥2 values")
    if param not in SWEEP_PARAMS:
        raise ConfigError(f"unknown sweep parameter '{param}' (expected one of {', '.join(SWEEP_PARAMS)})")
    if not suite:
        raise ConfigError("sweep needs at least one video")
    for inputs, configs in suite:
        if inputs.ground_truth is None:
            raise ConfigError(f"{inputs.name}: sweep needs ground truth")
        for value in values:
            configs.with_param(param, value)

    inner = threads if len(suite) == 1 else 1
    per_video = parallel_map(
        lambda entry: _sweep_video(entry[0], entry[1], param, values, inner), suite, threads,
    )
    results = tuple(tuple(video[i] for video in per_video) for i in range(len(values)))
    rows = tuple(summarize_results(repr(v), res) for v, res in zip(values, results))
    for value, row in zip(values, rows):
        logger.info("%s=%g: AJ %.4f (%d static points)", param, value, row.aj, row.num_static)
    return SweepTable(param=param, values=values, rows=rows, results=results)


def _load_suite(configs: Sequence[PipelineConfig], threads: int | None) -> list[tuple[PipelineInputs, StageConfigs]]:
    inner = threads if len(configs) == 1 else 1
    return parallel_map(
        lambda cfg: (load_inputs(cfg.validate_stages(), threads=inner), StageConfigs.from_config(cfg)),
        configs, threads,
    )


def sweep(
    configs: PipelineConfig | Sequence[PipelineConfig],
    param: str,
    values: Sequence[float],
    threads: int | None = None,
) -> SweepTable:
    """Load a suite of videos and sweep one threshold across it."""
    if isinstance(configs, PipelineConfig):
        configs = [configs]
    if len(values) < 2:
        raise ConfigError("sweep needs ≥2 values")
    return sweep_inputs(_load_suite(configs, threads), param, values, threads)


def _check_scored_suite(suite: Sequence[tuple[PipelineInputs, StageConfigs]], what: str) -> None:
    if not suite:
        raise ConfigError(f"{what} needs at least one video")
    for inputs, _ in suite:
        if inputs.ground_truth is None:
            raise ConfigError(f"{inputs.name}: {what} needs ground truth")


def _score(
    inputs: PipelineInputs, pred: TrackSet, cfg: MetricsConfig,
) -> tuple[float, dict[str, float | None] | None]:
    with stage("evaluate"):
        aj = average_jaccard(pred, inputs.ground_truth, cfg).average_jaccard
        categories = (
            category_scores(pred, inputs.ground_truth, inputs.labels, cfg) if inputs.labels is not None else None
        )
    return aj, categories


def _source_row(
    key: str,
    suite: Sequence[tuple[PipelineInputs, StageConfigs]],
    pick: Callable[[PipelineInputs], TrackSet],
) -> ScoreRow:
    scores = [_score(inputs, pick(inputs), configs.metrics) for inputs, configs in suite]
    return summarize(key, [aj for aj, _ in scores], [c for _, c in scores])


def compare_inputs(
    suite: Sequence[tuple[PipelineInputs, StageConfigs]],
    threads: int | None = None,
) -> ComparisonTable:
    """One row per single source plus the fused output."""
    _check_scored_suite(suite, "compare")
    labels: list[str] = []
    for inputs, _ in suite:
        labels.extend(label for label in inputs.sources if label not in labels)
    for inputs, _ in suite:
        missing = [label for label in labels if label not in inputs.sources]
        if missing:
            raise ConfigError(f"{inputs.name}: missing source(s) {', '.join(missing)}")

    inner = threads if len(suite) == 1 else 1
    fused = parallel_map(
        lambda entry: execute(entry[0], entry[1].mcmd, entry[1].mpd, entry[1].metrics, inner), suite, threads,
    )
    rows = [_source_row(label, suite, lambda inputs, label=label: inputs.sources[label]) for label in labels]
    rows.append(summarize_results(FUSED_LABEL, fused))
    return ComparisonTable(rows=tuple(rows))


def _ablate_video(
    inputs: PipelineInputs, configs: StageConfigs, threads: int | None,
) -> tuple[PipelineResult, PipelineResult]:
    """(MPD replacement on every video, full pipeline) for one video."""
    full = execute(inputs, configs.mcmd, configs.mpd, configs.metrics, threads)
    bypass = CameraMotionResult(False, 0.0, False, (), configs.mcmd, inputs.video.fps)
    flags = full.flags
    if flags is None:
        with stage("mpd"):
            flags = detect_static_points(inputs.sources[inputs.policy.mpd_reference_source], configs.mpd)
    with stage("dtc"):
        fused = fuse_with_flags(inputs.sources, bypass, inputs.policy, flags)
    report, categories = evaluate_fused(fused, inputs.ground_truth, inputs.labels, configs.metrics)
    return PipelineResult(inputs.name, fused, bypass, flags, report, categories), full


def ablation_inputs(
    suite: Sequence[tuple[PipelineInputs, StageConfigs]],
    threads: int | None = None,
) -> ComparisonTable:
    """Rows: base source, + MPD point replacement, + camera-aware correction."""
    _check_scored_suite(suite, "ablation")
    bases = {inputs.policy.static_camera_static_source for inputs, _ in suite}
    base_key = bases.pop() if len(bases) == 1 else "base"

    inner = threads if len(suite) == 1 else 1
    per_video = parallel_map(lambda entry: _ablate_video(entry[0], entry[1], inner), suite, threads)
    rows = (
        _source_row(base_key, suite, lambda inputs: inputs.sources[inputs.policy.static_camera_static_source]),
        summarize_results(MPD_ONLY_LABEL, [mpd_only for mpd_only, _ in per_video]),
        summarize_results(FULL_LABEL, [full for _, full in per_video]),
    )
    for row in rows:
        logger.info("ablation %s: AJ %.4f", row.key, row.aj)
    return ComparisonTable(rows=rows)


def compare(configs: PipelineConfig | Sequence[PipelineConfig], threads: int | None = None) -> ComparisonTable:
    """Load a suite and build its comparison table."""
    if isinstance(configs, PipelineConfig):
        configs = [configs]
    return compare_inputs(_load_suite(configs, threads), threads)


def ablation(configs: PipelineConfig | Sequence[PipelineConfig], threads: int | None = None) -> ComparisonTable:
    """Load a suite and build its component ablation table."""
    if isinstance(configs, PipelineConfig):
        configs = [configs]
    return ablation_inputs(_load_suite(configs, threads), threads)
