"""Synthetic scenes with known camera motion and ground-truth tracks.

The background is a seeded smoothed-noise texture sampled with wraparound
and translated by the camera; blobs are solid disks composited on top. Image
position of a scene point p at frame t is p - o(t), where o(t) = v * t is the
camera offset in pixels. Normalized coordinates are pixel / (width, height).
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from scipy.ndimage import shift as nd_shift
from scipy.ndimage import uniform_filter

from src.fpdtrack.errors import ConfigError
from src.fpdtrack.metrics.categories import GroundTruthLabels
from src.fpdtrack.runtime import parallel_map
from src.fpdtrack.synth.degrade import DegradationSpec
from src.fpdtrack.synth.rng import SplitMix64
from src.fpdtrack.tracks.models import TrackSet
from src.fpdtrack.video.models import Frame, VideoSequence

logger = logging.getLogger(__name__)

TEXTURE_BLUR_RADIUS = 2
SLOW_DRIFT_MAX_SPEED = 0.5  # px/frame


class CameraSpec(BaseModel):
    """Camera model: fixed, panning, or slowly drifting (velocities in px/frame)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["static", "pan", "slow_drift"] = "static"
    vx: float = 0.0
    vy: float = 0.0

    @model_validator(mode="after")
    def _check(self) -> "CameraSpec":
        if not (math.isfinite(self.vx) and math.isfinite(self.vy)):
            raise ValueError("camera velocity must be finite")
        if self.kind == "static" and (self.vx or self.vy):
            raise ValueError("a static camera has zero velocity")
        if self.kind == "slow_drift" and math.hypot(self.vx, self.vy) > SLOW_DRIFT_MAX_SPEED:
            raise ValueError(f"slow_drift speed must be <= {SLOW_DRIFT_MAX_SPEED} px/frame")
        return self

    @property
    def moving(self) -> bool:
        return self.kind != "static"

    def offset(self, t: int) -> tuple[float, float]:
        return self.vx * t, self.vy * t


class BlobSpec(BaseModel):
    """A solid disk moving with constant velocity in scene pixels."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    start: tuple[float, float]
    velocity: tuple[float, float] = (0.0, 0.0)
    radius: float = Field(default=4.0, gt=0)
    intensity: float = Field(default=1.0, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _check(self) -> "BlobSpec":
        if not all(math.isfinite(v) for v in (*self.start, *self.velocity)):
            raise ValueError("blob position and velocity must be finite")
        return self


class OcclusionSpec(BaseModel):
    """Hide ground-truth point ``point`` over frames [start, stop)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    point: int = Field(ge=0)
    start: int = Field(ge=0)
    stop: int = Field(ge=0)


class SceneSpec(BaseModel):
    """Everything needed to render a scene deterministically.

    Ground-truth points are ordered blobs first, then the background grid
    (row-major, ``background_grid`` x ``background_grid``).
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    width: int = Field(default=64, ge=32)
    height: int = Field(default=64, ge=32)
    num_frames: int = Field(default=60, ge=2)
    fps: float = Field(default=30.0, gt=0)
    camera: CameraSpec = CameraSpec()
    texture_seed: int = 0
    blobs: tuple[BlobSpec, ...] = ()
    background_grid: int = Field(default=2, ge=0)
    occlusions: tuple[OcclusionSpec, ...] = ()

    @property
    def num_points(self) -> int:
        return len(self.blobs) + self.background_grid ** 2


class SceneDocument(BaseModel):
    """scene.json: a scene plus named degradations of its ground truth."""

    model_config = ConfigDict(extra="forbid")

    scene: SceneSpec
    degradations: dict[str, DegradationSpec] = {}

    @classmethod
    def load(cls, path: str | Path) -> "SceneDocument":
        path = Path(path)
        try:
            return cls.model_validate(json.loads(path.read_text(encoding="utf-8")))
        except FileNotFoundError as e:
            raise ConfigError(f"scene file not found: {path}") from e
        except (json.JSONDecodeError, ValidationError) as e:
            raise ConfigError(f"invalid scene {path}: {e}") from e


@dataclass(frozen=True)
class SyntheticScene:
    """Rendered video, ground-truth tracks and true motion labels."""
    video: VideoSequence
    ground_truth: TrackSet
    labels: GroundTruthLabels
    spec: SceneSpec


def make_texture(width: int, height: int, seed: int) -> np.ndarray:
    """Box-blurred uniform noise rescaled to [0, 1], tileable."""
    noise = SplitMix64(seed).uniform(width * height).reshape(height, width)
    blurred = uniform_filter(noise, size=2 * TEXTURE_BLUR_RADIUS + 1, mode="wrap")
    lo, hi = blurred.min(), blurred.max()
    if hi - lo <= 0:
        return np.full_like(blurred, 0.5)
    return (blurred - lo) / (hi - lo)


def _blob_centers(spec: SceneSpec) -> np.ndarray:
    """(B, T, 2) blob centers in image pixels."""
    t = np.arange(spec.num_frames, dtype=np.float64)
    offsets = np.stack([spec.camera.vx * t, spec.camera.vy * t], axis=-1)
    centers = np.zeros((len(spec.blobs), spec.num_frames, 2), dtype=np.float64)
    for b, blob in enumerate(spec.blobs):
        start = np.asarray(blob.start, dtype=np.float64)
        velocity = np.asarray(blob.velocity, dtype=np.float64)
        centers[b] = start + velocity * t[:, None] - offsets
    return centers


def _background_positions(spec: SceneSpec) -> np.ndarray:
    """(G, T, 2) background grid points in image pixels."""
    n = spec.background_grid
    if n == 0:
        return np.zeros((0, spec.num_frames, 2), dtype=np.float64)
    xs = (np.arange(n) + 0.5) * spec.width / n
    ys = (np.arange(n) + 0.5) * spec.height / n
    grid = np.array([(x, y) for y in ys for x in xs], dtype=np.float64)
    t = np.arange(spec.num_frames, dtype=np.float64)
    offsets = np.stack([spec.camera.vx * t, spec.camera.vy * t], axis=-1)
    return grid[:, None, :] - offsets[None, :, :]


def _in_frame(positions: np.ndarray, spec: SceneSpec) -> np.ndarray:
    x, y = positions[..., 0], positions[..., 1]
    return (x >= 0) & (x < spec.width) & (y >= 0) & (y < spec.height)


def _declared_occlusions(spec: SceneSpec) -> np.ndarray:
    hidden = np.zeros((spec.num_points, spec.num_frames), dtype=bool)
    for occ in spec.occlusions:
        if occ.point >= spec.num_points:
            raise ConfigError(f"occlusion names point {occ.point}, scene has {spec.num_points}")
        hidden[occ.point, occ.start:min(occ.stop, spec.num_frames)] = True
    return hidden


def _render_frame(spec: SceneSpec, texture: np.ndarray, centers: np.ndarray, t: int) -> Frame:
    ox, oy = spec.camera.offset(t)
    if ox or oy:
        image = nd_shift(texture, (-oy, -ox), order=1, mode="grid-wrap")
    else:
        image = texture.copy()
    if len(spec.blobs):
        rows, cols = np.mgrid[0:spec.height, 0:spec.width]
        for b, blob in enumerate(spec.blobs):
            cx, cy = centers[b, t]
            disk = (cols - cx) ** 2 + (rows - cy) ** 2 <= blob.radius ** 2
            image[disk] = blob.intensity
    return Frame(np.clip(image, 0.0, 1.0))


def generate_scene(spec: SceneSpec, threads: int | None = None) -> SyntheticScene:
    """Render ``spec`` and derive its ground truth."""
    blob_centers = _blob_centers(spec)
    background = _background_positions(spec)
    positions = np.concatenate([blob_centers, background], axis=0)
    if positions.shape[0] == 0:
        raise ConfigError("scene has no ground-truth points (no blobs and background_grid=0)")

    hidden = _declared_occlusions(spec)
    in_frame = _in_frame(positions, spec)

    num_blobs = len(spec.blobs)
    escaped = ~in_frame[:num_blobs] & ~hidden[:num_blobs]
    if escaped.any():
        b, t = map(int, np.argwhere(escaped)[0])
        raise ConfigError(f"blob {b} leaves the frame at frame {t} without a declared occlusion")

    covered = np.zeros((background.shape[0], spec.num_frames), dtype=bool)
    for b, blob in enumerate(spec.blobs):
        d = np.hypot(*(background - blob_centers[b][None, :, :]).transpose(2, 0, 1))
        covered |= d <= blob.radius
    visibility = in_frame & ~hidden
    visibility[num_blobs:] &= ~covered

    if not visibility.any(axis=1).all():
        missing = int(np.flatnonzero(~visibility.any(axis=1))[0])
        raise ConfigError(f"ground-truth point {missing} is never visible")
    query_frames = visibility.argmax(axis=1)

    coords = positions / np.array([spec.width, spec.height], dtype=np.float64)
    ground_truth = TrackSet.from_arrays(
        coords, visibility, query_frames, source_name="gt", width=spec.width, height=spec.height,
    )

    static_points = np.zeros(positions.shape[0], dtype=bool)
    if not spec.camera.moving:
        for b, blob in enumerate(spec.blobs):
            static_points[b] = blob.velocity == (0.0, 0.0)
        static_points[num_blobs:] = True
    labels = GroundTruthLabels(camera_moving=spec.camera.moving, static_points=static_points)

    texture = make_texture(spec.width, spec.height, spec.texture_seed)
    frames = parallel_map(lambda t: _render_frame(spec, texture, blob_centers, t),
                          range(spec.num_frames), threads)
    video = VideoSequence(tuple(frames), fps=spec.fps)
    logger.debug("Rendered %d frames, %d ground-truth points (camera=%s)",
                 spec.num_frames, ground_truth.num_points, spec.camera.kind)
    return SyntheticScene(video=video, ground_truth=ground_truth, labels=labels, spec=spec)
