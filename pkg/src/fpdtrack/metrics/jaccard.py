"""Jaccard at pixel thresholds and Average Jaccard (TAP-Vid protocol).

Per evaluated (point, frame) slot, with d the metric-space distance:
  TP: pred visible, gt visible, d <= delta
  FP: pred visible and (gt occluded or d > delta)
  FN: gt visible and (pred occluded or d > delta)
A visible slot outside delta therefore counts as both FP and FN.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from src.fpdtrack.errors import ConfigError
from src.fpdtrack.tracks.models import TrackSet

DEFAULT_THRESHOLDS = (1.0, 2.0, 4.0, 8.0, 16.0)


@dataclass(frozen=True)
class MetricsConfig:
    """Thresholds (pixels) and the resolution distances are measured in."""
    thresholds: tuple[float, ...] = DEFAULT_THRESHOLDS
    eval_width: int = 256
    eval_height: int = 256
    exclude_query_frame: bool = True

    def validate(self) -> "MetricsConfig":
        values = tuple(float(t) for t in self.thresholds)
        if not values:
            raise ConfigError("at least one threshold is required")
        if any(t <= 0 for t in values) or any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigError(f"thresholds must be positive and strictly increasing, got {values}")
        if self.eval_width < 1 or self.eval_height < 1:
            raise ConfigError("evaluation resolution must be positive")
        return self

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["thresholds"] = list(self.thresholds)
        return data


@dataclass(frozen=True)
class ThresholdRecord:
    delta: float
    tp: int
    fp: int
    fn: int
    jaccard: float

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class MetricsReport:
    """Per-threshold counts and their mean Jaccard for one prediction."""
    records: tuple[ThresholdRecord, ...]
    average_jaccard: float
    num_points: int
    num_frames_evaluated: int  # evaluated (point, frame) slots
    config_used: MetricsConfig = field(default_factory=MetricsConfig)

    def jaccard(self, delta: float) -> float:
        for record in self.records:
            if record.delta == float(delta):
                return record.jaccard
        raise KeyError(delta)

    def to_dict(self) -> dict[str, Any]:
        return {
            "average_jaccard": self.average_jaccard,
            "num_points": self.num_points,
            "num_frames_evaluated": self.num_frames_evaluated,
            "thresholds": [record.to_dict() for record in self.records],
            "config": self.config_used.to_dict(),
        }


def _safe_jaccard(tp: int, fp: int, fn: int) -> float:
    denominator = tp + fp + fn
    return 1.0 if denominator == 0 else tp / denominator


def _check_pair(pred: TrackSet, gt: TrackSet) -> None:
    if pred.coords.shape != gt.coords.shape:
        raise ConfigError(
            f"prediction is M={pred.num_points} T={pred.num_frames}, "
            f"ground truth is M={gt.num_points} T={gt.num_frames}"
        )
    if not pred.same_queries(gt):
        raise ConfigError("prediction and ground truth track different queries")


def evaluation_mask(gt: TrackSet, cfg: MetricsConfig, points: np.ndarray | None = None) -> np.ndarray:
    """Boolean (M, T) mask of the slots that are scored."""
    mask = np.ones(gt.visibility.shape, dtype=bool)
    if cfg.exclude_query_frame:
        mask[np.arange(gt.num_points), gt.query_frames] = False
    if points is not None:
        mask &= np.asarray(points, dtype=bool)[:, None]
    return mask


def _distances(pred: TrackSet, gt: TrackSet, cfg: MetricsConfig) -> np.ndarray:
    dx = (pred.coords[:, :, 0] - gt.coords[:, :, 0]) * cfg.eval_width
    dy = (pred.coords[:, :, 1] - gt.coords[:, :, 1]) * cfg.eval_height
    return np.hypot(dx, dy)


def _counts(
    pred_vis: np.ndarray,
    gt_vis: np.ndarray,
    dist: np.ndarray,
    mask: np.ndarray,
    delta: float,
) -> tuple[int, int, int]:
    within = dist <= delta
    tp = int(np.count_nonzero(pred_vis & gt_vis & within & mask))
    fp = int(np.count_nonzero(pred_vis & (~gt_vis | ~within) & mask))
    fn = int(np.count_nonzero(gt_vis & (~pred_vis | ~within) & mask))
    return tp, fp, fn


def jaccard_at(
    pred: TrackSet,
    gt: TrackSet,
    delta_px: float,
    cfg: MetricsConfig | None = None,
    points: np.ndarray | None = None,
) -> tuple[int, int, int, float]:
    """(tp, fp, fn, jaccard) at one pixel threshold."""
    cfg = (cfg or MetricsConfig()).validate()
    _check_pair(pred, gt)
    mask = evaluation_mask(gt, cfg, points)
    tp, fp, fn = _counts(pred.visibility, gt.visibility, _distances(pred, gt, cfg), mask, float(delta_px))
    return tp, fp, fn, _safe_jaccard(tp, fp, fn)


def average_jaccard(
    pred: TrackSet,
    gt: TrackSet,
    cfg: MetricsConfig | None = None,
    points: np.ndarray | None = None,
) -> MetricsReport:
    """Jaccard at every configured threshold and their mean.

    ``points`` optionally restricts scoring to a boolean subset of points.
    """
    cfg = (cfg or MetricsConfig()).validate()
    _check_pair(pred, gt)
    mask = evaluation_mask(gt, cfg, points)
    dist = _distances(pred, gt, cfg)
    records = []
    for delta in cfg.thresholds:
        tp, fp, fn = _counts(pred.visibility, gt.visibility, dist, mask, float(delta))
        records.append(ThresholdRecord(float(delta), tp, fp, fn, _safe_jaccard(tp, fp, fn)))
    aj = float(np.mean([record.jaccard for record in records]))
    num_points = gt.num_points if points is None else int(np.count_nonzero(points))
    return MetricsReport(
        records=tuple(records),
        average_jaccard=aj,
        num_points=num_points,
        num_frames_evaluated=int(np.count_nonzero(mask)),
        config_used=cfg,
    )
