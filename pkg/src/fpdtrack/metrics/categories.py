"""Ground-truth motion labels and per-category Average Jaccard.

Categories follow the true recording condition, not the pipeline's own
classification:
  sc_sp  static camera, static point
  sc_mp  static camera, moving point
  mc_mp  moving camera (every point moves in the image)
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from src.fpdtrack.errors import ConfigError
from src.fpdtrack.metrics.jaccard import MetricsConfig, average_jaccard
from src.fpdtrack.tracks.models import TrackSet

CATEGORIES = ("sc_sp", "sc_mp", "mc_mp")


@dataclass(frozen=True, eq=False)
class GroundTruthLabels:
    """True camera motion and per-point static flags of one video."""
    camera_moving: bool
    static_points: np.ndarray

    def to_dict(self) -> dict[str, Any]:
        return {
            "camera_moving": self.camera_moving,
            "static_points": [bool(v) for v in self.static_points],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "GroundTruthLabels":
        try:
            return cls(
                camera_moving=bool(data["camera_moving"]),
                static_points=np.asarray(data["static_points"], dtype=bool),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"invalid labels document: {e}") from e

    @classmethod
    def load(cls, path: str | Path) -> "GroundTruthLabels":
        path = Path(path)
        try:
            return cls.from_dict(json.loads(path.read_text(encoding="utf-8")))
        except FileNotFoundError as e:
            raise ConfigError(f"labels file not found: {path}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"labels file {path} is not valid JSON: {e}") from e

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict()) + "\n", encoding="utf-8")
        return path


def category_masks(labels: GroundTruthLabels) -> dict[str, np.ndarray]:
    """Boolean point masks per category."""
    static = np.asarray(labels.static_points, dtype=bool)
    none = np.zeros_like(static)
    if labels.camera_moving:
        return {"sc_sp": none, "sc_mp": none, "mc_mp": ~none}
    return {"sc_sp": static, "sc_mp": ~static, "mc_mp": none}


def category_scores(
    pred: TrackSet,
    gt: TrackSet,
    labels: GroundTruthLabels,
    cfg: MetricsConfig | None = None,
) -> dict[str, float | None]:
    """AJ per category; None for a category with no points in this video."""
    if len(labels.static_points) != gt.num_points:
        raise ConfigError(f"labels cover {len(labels.static_points)} points, tracks have {gt.num_points}")
    scores: dict[str, float | None] = {}
    for name, mask in category_masks(labels).items():
        scores[name] = average_jaccard(pred, gt, cfg, points=mask).average_jaccard if mask.any() else None
    return scores


def mean_skipping_none(values: list[float | None]) -> float | None:
    """Unweighted mean of the present values."""
    present = [v for v in values if v is not None]
    return float(np.mean(present)) if present else None
