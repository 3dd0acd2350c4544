"""Dynamic trajectory correction.

Moving camera: every point comes from ``moving_camera_source``.
Static camera: points are classified on ``mpd_reference_source``; static
points take their row from ``static_camera_static_source`` and moving points
from ``static_camera_moving_source``. Visibility always travels with the
selected trajectory.
"""

from __future__ import annotations

import json
import logging
from dataclasses import replace
from pathlib import Path
from typing import Mapping

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from src.fpdtrack.errors import ConfigError, InvariantError
from src.fpdtrack.perception.mcmd import CameraMotionResult
from src.fpdtrack.perception.mpd import MpdConfig, PointMotionFlags, detect_static_points
from src.fpdtrack.tracks.models import TrackSet

logger = logging.getLogger(__name__)


class FusionPolicy(BaseModel):
    """Which source fills which role; mirrors policy.json."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    moving_camera_source: str
    static_camera_static_source: str
    static_camera_moving_source: str
    mpd_reference_source: str | None = None
    stabilize_static: bool = False

    @model_validator(mode="before")
    @classmethod
    def _default_reference(cls, data: object) -> object:
        if isinstance(data, dict) and data.get("mpd_reference_source") is None:
            data = {**data, "mpd_reference_source": data.get("static_camera_static_source")}
        return data

    @property
    def labels(self) -> tuple[str, ...]:
        return (
            self.moving_camera_source,
            self.static_camera_static_source,
            self.static_camera_moving_source,
            self.mpd_reference_source or self.static_camera_static_source,
        )

    @classmethod
    def load(cls, path: str | Path) -> "FusionPolicy":
        path = Path(path)
        try:
            return cls.model_validate(json.loads(path.read_text(encoding="utf-8")))
        except FileNotFoundError as e:
            raise ConfigError(f"policy file not found: {path}") from e
        except (json.JSONDecodeError, ValidationError) as e:
            raise ConfigError(f"invalid policy {path}: {e}") from e

    @classmethod
    def single_source(cls, label: str) -> "FusionPolicy":
        """Policy that always picks ``label``."""
        return cls(
            moving_camera_source=label,
            static_camera_static_source=label,
            static_camera_moving_source=label,
        )


def check_sources(sources: Mapping[str, TrackSet], policy: FusionPolicy) -> None:
    """Every label the policy names exists and all sources track the same queries."""
    missing = sorted({label for label in policy.labels if label not in sources})
    if missing:
        raise ConfigError(f"policy names unknown source(s): {', '.join(missing)}")
    reference = sources[policy.labels[0]]
    for label, ts in sources.items():
        if ts.coords.shape != reference.coords.shape:
            raise ConfigError(
                f"source '{label}' has M={ts.num_points} T={ts.num_frames}, "
                f"expected M={reference.num_points} T={reference.num_frames}"
            )
        if not ts.same_queries(reference):
            raise ConfigError(f"source '{label}' tracks different query points")


def stabilize_static_track(track_xy: np.ndarray, visibility: np.ndarray) -> np.ndarray:
    """Pin a static track to the per-coordinate median of its visible frames."""
    xy = np.asarray(track_xy, dtype=np.float64)
    vis = np.asarray(visibility, dtype=bool)
    if not vis.any():
        return xy.copy()
    center = np.median(xy[vis], axis=0)
    return np.broadcast_to(center, xy.shape).copy()


def _policy_name(camera: CameraMotionResult, policy: FusionPolicy) -> str:
    if camera.moving:
        return f"fpd[moving-camera:{policy.moving_camera_source}]"
    suffix = ",stabilized" if policy.stabilize_static else ""
    return (
        f"fpd[static-camera:static={policy.static_camera_static_source},"
        f"moving={policy.static_camera_moving_source},mpd={policy.mpd_reference_source}{suffix}]"
    )


def fuse_with_flags(
    sources: Mapping[str, TrackSet],
    camera: CameraMotionResult,
    policy: FusionPolicy,
    flags: PointMotionFlags | None,
) -> TrackSet:
    """Assemble the fused set from already computed point flags."""
    check_sources(sources, policy)
    name = _policy_name(camera, policy)
    if camera.moving:
        return sources[policy.moving_camera_source].with_name(name)
    if flags is None:
        raise InvariantError("static-camera fusion needs point motion flags")

    static_rows = np.flatnonzero(flags.static_flags)
    moving_rows = np.flatnonzero(~flags.static_flags)
    fused = sources[policy.static_camera_static_source]
    fused = fused.replace_rows(moving_rows, sources[policy.static_camera_moving_source])

    if policy.stabilize_static and static_rows.size:
        coords = fused.coords.copy()
        for i in static_rows:
            coords[i] = stabilize_static_track(fused.coords[i], fused.visibility[i])
        fused = replace(fused, coords=coords)

    logger.info("Fused %d static rows from '%s' and %d moving rows from '%s'",
                static_rows.size, policy.static_camera_static_source,
                moving_rows.size, policy.static_camera_moving_source)
    return fused.with_name(name)


def fuse(
    sources: Mapping[str, TrackSet],
    camera: CameraMotionResult,
    policy: FusionPolicy,
    mpd_cfg: MpdConfig | None = None,
) -> tuple[TrackSet, PointMotionFlags | None]:
    """Per-point selection across named sources.

    Returns the fused set and the point flags, which are None when the camera
    is moving (point classification is skipped in that branch).
    """
    check_sources(sources, policy)
    if camera.moving:
        return fuse_with_flags(sources, camera, policy, None), None
    flags = detect_static_points(sources[policy.mpd_reference_source], mpd_cfg)
    return fuse_with_flags(sources, camera, policy, flags), flags
