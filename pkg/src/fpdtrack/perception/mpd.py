"""Moving point detection.

A point is static when the population standard deviation of its visible
coordinates is below rho on both axes. Points with fewer than
``min_visible`` visible frames carry no motion evidence and default to static.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

from src.fpdtrack.errors import ConfigError
from src.fpdtrack.tracks.models import TrackSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MpdConfig:
    """Deviation threshold (normalized units) and evidence floor."""
    rho: float = 0.00125
    min_visible: int = 2

    def validate(self) -> "MpdConfig":
        if not self.rho > 0:
            raise ConfigError(f"rho must be positive, got {self.rho}")
        if self.min_visible < 1:
            raise ConfigError(f"min_visible must be >= 1, got {self.min_visible}")
        return self

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class PointDeviations:
    """Per-point deviations, independent of any threshold."""
    sigma_x: np.ndarray
    sigma_y: np.ndarray
    visible_counts: np.ndarray


@dataclass(frozen=True, eq=False)
class PointMotionFlags:
    """Per-point static/moving labels with their evidence."""
    static_flags: np.ndarray
    sigma_x: np.ndarray
    sigma_y: np.ndarray
    visible_counts: np.ndarray
    rho: float = 0.00125
    min_visible: int = 2

    @property
    def num_static(self) -> int:
        return int(np.count_nonzero(self.static_flags))

    def to_records(self) -> list[dict[str, Any]]:
        return [
            {
                "index": i,
                "sigma_x": float(self.sigma_x[i]),
                "sigma_y": float(self.sigma_y[i]),
                "n_visible": int(self.visible_counts[i]),
                "static": bool(self.static_flags[i]),
            }
            for i in range(len(self.static_flags))
        ]

    def to_dict(self) -> dict[str, Any]:
        return {
            "rho": self.rho,
            "min_visible": self.min_visible,
            "num_points": len(self.static_flags),
            "num_static": self.num_static,
            "points": self.to_records(),
        }


def _masked_population_std(coords: np.ndarray, visibility: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Two-pass masked std over the frame axis of (M, T, 2) coordinates."""
    counts = visibility.sum(axis=1)
    mask = visibility[:, :, None]
    safe = np.maximum(counts, 1)[:, None]
    mean = np.where(mask, coords, 0.0).sum(axis=1) / safe
    centered = np.where(mask, coords - mean[:, None, :], 0.0)
    var = (centered * centered).sum(axis=1) / safe
    sigma = np.sqrt(var)
    sigma[counts < 2] = 0.0
    return sigma[:, 0], sigma[:, 1], counts.astype(np.int64)


def point_deviation(track_xy: np.ndarray, visibility: np.ndarray) -> tuple[float, float, int]:
    """Population std of one track's visible coordinates: (sigma_x, sigma_y, n_visible)."""
    xy = np.asarray(track_xy, dtype=np.float64)
    vis = np.asarray(visibility, dtype=bool)
    if xy.ndim != 2 or xy.shape[1] != 2 or vis.shape != (xy.shape[0],) or xy.shape[0] < 1:
        raise ConfigError(f"point_deviation needs T x 2 coords and T flags, got {xy.shape} and {vis.shape}")
    sx, sy, n = _masked_population_std(xy[None], vis[None])
    return float(sx[0]), float(sy[0]), int(n[0])


def compute_deviations(ts: TrackSet) -> PointDeviations:
    """Deviations for every point of a track set."""
    sx, sy, n = _masked_population_std(ts.coords, ts.visibility)
    return PointDeviations(sigma_x=sx, sigma_y=sy, visible_counts=n)


def flags_from_deviations(dev: PointDeviations, cfg: MpdConfig | None = None) -> PointMotionFlags:
    """Threshold precomputed deviations."""
    cfg = (cfg or MpdConfig()).validate()
    insufficient = dev.visible_counts < cfg.min_visible
    static = insufficient | ((dev.sigma_x < cfg.rho) & (dev.sigma_y < cfg.rho))
    return PointMotionFlags(
        static_flags=static,
        sigma_x=dev.sigma_x,
        sigma_y=dev.sigma_y,
        visible_counts=dev.visible_counts,
        rho=cfg.rho,
        min_visible=cfg.min_visible,
    )


def detect_static_points(ts: TrackSet, cfg: MpdConfig | None = None) -> PointMotionFlags:
    """Flag each point of ``ts`` as static or moving."""
    flags = flags_from_deviations(compute_deviations(ts), cfg)
    logger.info("%s: %d/%d points static (rho=%g)", ts.source_name or "tracks",
                flags.num_static, ts.num_points, flags.rho)
    return flags
