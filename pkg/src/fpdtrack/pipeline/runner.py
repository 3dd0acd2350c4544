"""End-to-end orchestration: MCMD -> MPD -> DTC -> optional evaluation.

Every failure inside a stage surfaces as a StageError naming the stage.
"""

from __future__ import annotations

import asyncio
import json
import logging
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterator, Mapping, Sequence

from src.fpdtrack.correction.dtc import FusionPolicy, check_sources, fuse_with_flags
from src.fpdtrack.errors import ConfigError, StageError
from src.fpdtrack.metrics.categories import GroundTruthLabels, category_scores
from src.fpdtrack.metrics.jaccard import MetricsConfig, MetricsReport, average_jaccard
from src.fpdtrack.perception.mcmd import CameraMotionResult, McmdConfig, detect_camera_motion
from src.fpdtrack.perception.mpd import MpdConfig, PointMotionFlags, detect_static_points
from src.fpdtrack.pipeline.config import PipelineConfig
from src.fpdtrack.runtime import resolve_threads
from src.fpdtrack.tracks.io import load_tracks, save_tracks
from src.fpdtrack.tracks.models import TrackSet
from src.fpdtrack.video.io import load_frame_sequence
from src.fpdtrack.video.models import VideoSequence

logger = logging.getLogger(__name__)

CAMERA_REPORT = "camera.json"
POINTS_REPORT = "points.json"
METRICS_REPORT = "metrics.json"
FUSED_STEM = "fused"


@contextmanager
def stage(name: str) -> Iterator[None]:
    """Tag any exception raised in the block with the stage name."""
    logger.debug("stage %s", name)
    try:
        yield
    except StageError:
        raise
    except Exception as e:
        raise StageError(name, e) from e


@dataclass(frozen=True)
class PipelineInputs:
    """Everything one video contributes, already decoded."""
    name: str
    video: VideoSequence
    sources: Mapping[str, TrackSet]
    policy: FusionPolicy
    ground_truth: TrackSet | None = None
    labels: GroundTruthLabels | None = None


@dataclass(frozen=True)
class PipelineResult:
    name: str
    fused: TrackSet
    camera: CameraMotionResult
    flags: PointMotionFlags | None
    metrics: MetricsReport | None = None
    categories: dict[str, float | None] | None = None

    @property
    def average_jaccard(self) -> float | None:
        return self.metrics.average_jaccard if self.metrics else None

    def metrics_dict(self) -> dict[str, Any] | None:
        if self.metrics is None:
            return None
        data = self.metrics.to_dict()
        if self.categories is not None:
            data["categories"] = dict(self.categories)
        return data


def load_inputs(cfg: PipelineConfig, ground_truth: str | Path | None = None, threads: int | None = None) -> PipelineInputs:
    """Decode frames, sources, policy, and optional truth for one config."""
    with stage("load"):
        video = load_frame_sequence(cfg.frames_dir, cfg.manifest, default_fps=cfg.default_fps, threads=threads)
        sources = {label: load_tracks(path).with_name(label) for label, path in cfg.sources.items()}
        policy = cfg.resolve_policy()
        check_sources(sources, policy)
        gt_path = ground_truth or cfg.ground_truth
        gt = load_tracks(gt_path) if gt_path else None
        labels = GroundTruthLabels.load(cfg.labels) if cfg.labels else None
        if labels is not None and gt is None:
            raise ConfigError("labels given without ground truth")
    return PipelineInputs(
        name=cfg.video_name, video=video, sources=sources, policy=policy,
        ground_truth=gt, labels=labels,
    )


def evaluate_fused(
    fused: TrackSet,
    gt: TrackSet | None,
    labels: GroundTruthLabels | None,
    cfg: MetricsConfig,
) -> tuple[MetricsReport | None, dict[str, float | None] | None]:
    """Overall report plus per-category AJ when truth labels exist."""
    if gt is None:
        return None, None
    with stage("evaluate"):
        report = average_jaccard(fused, gt, cfg)
        categories = category_scores(fused, gt, labels, cfg) if labels is not None else None
    return report, categories


def execute(
    inputs: PipelineInputs,
    mcmd: McmdConfig | None = None,
    mpd: MpdConfig | None = None,
    metrics: MetricsConfig | None = None,
    threads: int | None = None,
) -> PipelineResult:
    """Run every stage on decoded inputs, with no caching."""
    with stage("mcmd"):
        camera = detect_camera_motion(inputs.video, mcmd, threads)
    flags = None
    if not camera.moving:
        with stage("mpd"):
            reference = inputs.policy.mpd_reference_source
            if reference not in inputs.sources:
                raise ConfigError(f"policy names unknown source(s): {reference}")
            flags = detect_static_points(inputs.sources[reference], mpd)
    with stage("dtc"):
        fused = fuse_with_flags(inputs.sources, camera, inputs.policy, flags)
    report, categories = evaluate_fused(fused, inputs.ground_truth, inputs.labels, metrics or MetricsConfig())
    if report is not None:
        logger.info("%s: AJ %.4f", inputs.name, report.average_jaccard)
    return PipelineResult(inputs.name, fused, camera, flags, report, categories)


def _dump(path: Path, payload: dict[str, Any]) -> None:
    try:
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot write {path}: {e}") from e


def write_artifacts(result: PipelineResult, out_dir: str | Path, fused_format: str = "binary") -> dict[str, Path]:
    """camera.json, points.json (static camera only), fused track file, metrics.json."""
    out = Path(out_dir)
    written: dict[str, Path] = {}
    with stage("write"):
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ConfigError(f"cannot create output directory {out}: {e}") from e
        _dump(out / CAMERA_REPORT, result.camera.to_dict())
        written["camera"] = out / CAMERA_REPORT
        if result.flags is not None:
            _dump(out / POINTS_REPORT, result.flags.to_dict())
            written["points"] = out / POINTS_REPORT
        suffix = ".json" if fused_format == "json" else ".fpdt"
        written["fused"] = save_tracks(result.fused, out / f"{FUSED_STEM}{suffix}", fused_format)
        metrics = result.metrics_dict()
        if metrics is not None:
            _dump(out / METRICS_REPORT, metrics)
            written["metrics"] = out / METRICS_REPORT
    logger.info("Wrote %d artifacts to %s", len(written), out)
    return written


def run_pipeline(
    cfg: PipelineConfig,
    ground_truth: str | Path | None = None,
    threads: int | None = None,
) -> PipelineResult:
    """Load, run every stage, and write artifacts when ``output_dir`` is set."""
    with stage("load"):
        cfg.validate_stages()
    inputs = load_inputs(cfg, ground_truth, threads)
    result = execute(inputs, cfg.mcmd, cfg.mpd, cfg.metrics, threads)
    if cfg.output_dir is not None:
        write_artifacts(result, cfg.output_dir, cfg.fused_format)
    return result


async def run_batch(configs: Sequence[PipelineConfig], threads: int | None = None) -> list[PipelineResult]:
    """Run several videos concurrently; results keep the config order."""
    semaphore = asyncio.Semaphore(resolve_threads(threads))

    async def run(cfg: PipelineConfig) -> PipelineResult:
        async with semaphore:
            # one worker per video inside a batch
            return await asyncio.to_thread(run_pipeline, cfg, None, 1)

    results = await asyncio.gather(*(run(cfg) for cfg in configs))
    logger.info("Pipeline batch finished: %d videos", len(results))
    return list(results)
