"""Multi-granularity camera motion detection.

A unit (whole video or clip) is "moving" when the fraction of its frames
whose SSIM against the unit's first frame falls below lambda exceeds eta.
The video is moving only when the coarse (whole-video) pass fires AND at
least one fine (clip) pass fires.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

import numpy as np

from src.fpdtrack.errors import ConfigError, InvariantError
from src.fpdtrack.perception.ssim import SsimConfig, ssim_to_reference
from src.fpdtrack.runtime import parallel_map
from src.fpdtrack.video.io import to_grayscale
from src.fpdtrack.video.models import Frame, VideoSequence

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class McmdConfig:
    """Thresholds for camera motion detection."""
    lambda_coarse: float = 0.5
    lambda_fine: float = 0.46
    eta: float = 0.5
    clip_seconds: float = 5.0
    ssim: SsimConfig = field(default_factory=SsimConfig)

    def validate(self) -> "McmdConfig":
        for name in ("lambda_coarse", "lambda_fine", "eta"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ConfigError(f"{name} must lie in (0, 1), got {value}")
        if not self.clip_seconds > 0:
            raise ConfigError(f"clip_seconds must be positive, got {self.clip_seconds}")
        self.ssim.validate()
        return self

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class ClipResult:
    """Verdict for one half-open frame range."""
    start: int
    stop: int
    fraction: float
    moving: bool

    def to_dict(self) -> dict[str, Any]:
        return {"start": self.start, "stop": self.stop, "fraction": self.fraction, "moving": self.moving}


@dataclass(frozen=True)
class CameraMotionResult:
    """Static/moving camera verdict with the evidence behind it."""
    moving: bool
    coarse_fraction: float
    coarse_moving: bool
    clip_results: tuple[ClipResult, ...]
    config_used: McmdConfig
    fps: float = 30.0

    def __post_init__(self) -> None:
        fine = any(clip.moving for clip in self.clip_results)
        if self.moving != (self.coarse_moving and fine):
            raise InvariantError("camera verdict must equal coarse AND any(clip)")

    @property
    def fine_moving(self) -> bool:
        return any(clip.moving for clip in self.clip_results)

    def to_dict(self) -> dict[str, Any]:
        return {
            "moving": self.moving,
            "coarse_moving": self.coarse_moving,
            "coarse_fraction": self.coarse_fraction,
            "fine_moving": self.fine_moving,
            "fps": self.fps,
            "clips": [clip.to_dict() for clip in self.clip_results],
            "config": self.config_used.to_dict(),
        }


@dataclass(frozen=True)
class SsimProfile:
    """Cached SSIM-to-reference series for the coarse pass and every clip.

    Thresholds can be re-applied to a profile without touching pixels again.
    """
    coarse: np.ndarray
    clips: tuple[tuple[int, int], ...]
    clip_scores: tuple[np.ndarray, ...]
    fps: float


def partition_clips(frame_count: int, fps: float, clip_seconds: float) -> list[tuple[int, int]]:
    """Split [0, frame_count) into consecutive clips of ~clip_seconds.

    A trailing partial clip shorter than 2 frames is merged into the
    previous clip.
    """
    if frame_count < 1 or not fps > 0 or not clip_seconds > 0:
        raise ConfigError("partition_clips needs frame_count >= 1, fps > 0 and clip_seconds > 0")
    length = max(1, int(math.floor(clip_seconds * fps + 0.5)))
    ranges = [(start, min(start + length, frame_count)) for start in range(0, frame_count, length)]
    if len(ranges) > 1:
        start, stop = ranges[-1]
        if stop - start < length and stop - start < 2:
            ranges.pop()
            ranges[-1] = (ranges[-1][0], stop)
    return ranges


def dissimilar_fraction(similarities: np.ndarray, lam: float) -> float:
    """Fraction of entries strictly below lam (reference included in the count base)."""
    if similarities.size == 0:
        return 0.0
    return int(np.count_nonzero(similarities < lam)) / similarities.size


def moving_score(
    frames: Sequence[Frame],
    lam: float,
    eta: float,
    ssim_cfg: SsimConfig | None = None,
    threads: int | None = None,
) -> tuple[bool, float]:
    """Moving verdict and dissimilar fraction of a frame list against its first frame."""
    if not frames:
        raise ConfigError("moving_score needs at least one frame")
    gray = [to_grayscale(frame) for frame in frames]
    fraction = dissimilar_fraction(ssim_to_reference(gray, ssim_cfg, threads), lam)
    return fraction > eta, fraction


def compute_ssim_profile(
    video: VideoSequence,
    cfg: McmdConfig | None = None,
    threads: int | None = None,
) -> SsimProfile:
    """Compute the SSIM series needed by every granularity."""
    cfg = (cfg or McmdConfig()).validate()
    gray = parallel_map(to_grayscale, video.frames, threads)
    coarse = ssim_to_reference(gray, cfg.ssim, threads)
    clips = tuple(partition_clips(video.num_frames, video.fps, cfg.clip_seconds))
    clip_scores = []
    for start, stop in clips:
        if start == 0:
            # Same reference frame as the coarse pass
            clip_scores.append(coarse[start:stop].copy())
        else:
            clip_scores.append(ssim_to_reference(gray[start:stop], cfg.ssim, threads))
    return SsimProfile(coarse=coarse, clips=clips, clip_scores=tuple(clip_scores), fps=video.fps)


def classify_profile(profile: SsimProfile, cfg: McmdConfig | None = None) -> CameraMotionResult:
    """Apply lambda/eta thresholds to a cached SSIM profile."""
    cfg = (cfg or McmdConfig()).validate()
    coarse_fraction = dissimilar_fraction(profile.coarse, cfg.lambda_coarse)
    coarse_moving = coarse_fraction > cfg.eta

    clip_results = []
    for (start, stop), scores in zip(profile.clips, profile.clip_scores):
        fraction = dissimilar_fraction(scores, cfg.lambda_fine)
        clip_results.append(ClipResult(start, stop, fraction, fraction > cfg.eta))
        logger.debug("clip [%d, %d): fraction=%.4f moving=%s", start, stop, fraction, fraction > cfg.eta)

    fine_moving = any(clip.moving for clip in clip_results)
    return CameraMotionResult(
        moving=coarse_moving and fine_moving,
        coarse_fraction=coarse_fraction,
        coarse_moving=coarse_moving,
        clip_results=tuple(clip_results),
        config_used=cfg,
        fps=profile.fps,
    )


def detect_camera_motion(
    video: VideoSequence,
    cfg: McmdConfig | None = None,
    threads: int | None = None,
) -> CameraMotionResult:
    """Classify the recording camera as static or moving."""
    result = classify_profile(compute_ssim_profile(video, cfg, threads), cfg)
    logger.info(
        "Camera %s (coarse fraction %.3f, %d/%d clips moving)",
        "moving" if result.moving else "static",
        result.coarse_fraction,
        sum(clip.moving for clip in result.clip_results),
        len(result.clip_results),
    )
    return result
