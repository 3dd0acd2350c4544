"""Dataset-level evaluation over directories of track files."""

from __future__ import annotations

import asyncio
import csv
import io
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from src.fpdtrack.errors import ConfigError
from src.fpdtrack.metrics.jaccard import MetricsConfig, MetricsReport, average_jaccard
from src.fpdtrack.runtime import resolve_threads
from src.fpdtrack.tracks.io import load_tracks

logger = logging.getLogger(__name__)

TRACK_SUFFIXES = (".fpdt", ".json", ".bin")


@dataclass(frozen=True)
class DatasetReport:
    """Per-video reports and their unweighted mean AJ."""
    videos: tuple[tuple[str, MetricsReport], ...]
    mean_average_jaccard: float

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        thresholds = self.videos[0][1].config_used.thresholds if self.videos else ()
        writer.writerow(["video", "aj", *[f"j{t:g}" for t in thresholds]])
        for name, report in self.videos:
            writer.writerow([name, repr(report.average_jaccard), *[repr(r.jaccard) for r in report.records]])
        return buffer.getvalue()

    def to_dict(self) -> dict:
        return {
            "num_videos": len(self.videos),
            "mean_average_jaccard": self.mean_average_jaccard,
            "videos": {name: report.to_dict() for name, report in self.videos},
        }


def pair_track_files(pred_dir: str | Path, gt_dir: str | Path) -> list[tuple[str, Path, Path]]:
    """Match prediction and ground-truth files by stem, sorted by name."""
    def index(directory: Path) -> dict[str, Path]:
        if not directory.is_dir():
            raise ConfigError(f"directory not found: {directory}")
        return {p.stem: p for p in sorted(directory.iterdir())
                if p.is_file() and p.suffix.lower() in TRACK_SUFFIXES}

    preds, gts = index(Path(pred_dir)), index(Path(gt_dir))
    missing = sorted(set(gts) - set(preds))
    if missing:
        raise ConfigError(f"no prediction for: {', '.join(missing)}")
    extra = sorted(set(preds) - set(gts))
    if extra:
        logger.warning("Ignoring predictions without ground truth: %s", ", ".join(extra))
    return [(stem, preds[stem], gts[stem]) for stem in sorted(gts)]


def _evaluate_pair(pred_path: Path, gt_path: Path, cfg: MetricsConfig) -> MetricsReport:
    return average_jaccard(load_tracks(pred_path), load_tracks(gt_path), cfg)


async def evaluate_directory(
    pred_dir: str | Path,
    gt_dir: str | Path,
    cfg: MetricsConfig | None = None,
    threads: int | None = None,
) -> DatasetReport:
    """Evaluate every matched pair concurrently."""
    cfg = (cfg or MetricsConfig()).validate()
    pairs = pair_track_files(pred_dir, gt_dir)
    if not pairs:
        raise ConfigError(f"no track files found in {gt_dir}")
    semaphore = asyncio.Semaphore(resolve_threads(threads))

    async def run(pred_path: Path, gt_path: Path) -> MetricsReport:
        async with semaphore:
            return await asyncio.to_thread(_evaluate_pair, pred_path, gt_path, cfg)

    reports = await asyncio.gather(*(run(p, g) for _, p, g in pairs))
    videos = tuple((name, report) for (name, _, _), report in zip(pairs, reports))
    mean = float(np.mean([report.average_jaccard for report in reports]))
    logger.info("Evaluated %d videos, mean AJ %.4f", len(videos), mean)
    return DatasetReport(videos=videos, mean_average_jaccard=mean)
