"""Structural similarity with a uniform (box) window.

For every pixel whose full window fits inside the frame, the window means,
variances and covariance give the SSIM map value

    ((2 mx my + C1)(2 sxy + C2)) / ((mx^2 + my^2 + C1)(sx^2 + sy^2 + C2))

with C1 = (k1 L)^2 and C2 = (k2 L)^2. The full map comes from scikit-image;
the scalar is the mean of the map after cropping (window_size - 1) / 2 pixels
from every side, accumulated row by row in double precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from skimage.metrics import structural_similarity

from src.fpdtrack.errors import ConfigError, FrameFormatError
from src.fpdtrack.runtime import parallel_map
from src.fpdtrack.video.models import Frame


@dataclass(frozen=True)
class SsimConfig:
    """SSIM parameters; defaults reproduce the common box-window reference."""
    window_size: int = 7
    k1: float = 0.01
    k2: float = 0.03
    data_range: float = 1.0
    sample_covariance: bool = True  # normalize by N-1
    gaussian_weights: bool = False  # not supported, rejected by validate()

    def validate(self) -> "SsimConfig":
        if self.gaussian_weights:
            raise ConfigError("Gaussian-weighted SSIM is not supported; use the box window")
        if self.window_size < 3 or self.window_size % 2 == 0:
            raise ConfigError(f"window_size must be odd and >= 3, got {self.window_size}")
        for name in ("k1", "k2", "data_range"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        return self

    @property
    def c1(self) -> float:
        return (self.k1 * self.data_range) ** 2

    @property
    def c2(self) -> float:
        return (self.k2 * self.data_range) ** 2


def _as_gray_array(image: Frame | np.ndarray) -> np.ndarray:
    pixels = image.pixels if isinstance(image, Frame) else np.asarray(image, dtype=np.float64)
    if pixels.ndim == 3 and pixels.shape[2] == 1:
        pixels = pixels[:, :, 0]
    if pixels.ndim != 2:
        raise FrameFormatError("SSIM needs single-channel frames")
    return pixels.astype(np.float64, copy=False)


def ssim_map(a: Frame | np.ndarray, b: Frame | np.ndarray, cfg: SsimConfig | None = None) -> np.ndarray:
    """Cropped SSIM map (only pixels whose full window fits)."""
    cfg = (cfg or SsimConfig()).validate()
    x = _as_gray_array(a)
    y = _as_gray_array(b)
    if x.shape != y.shape:
        raise FrameFormatError(f"dimension mismatch: {x.shape} vs {y.shape}")
    win = cfg.window_size
    if min(x.shape) < win:
        raise FrameFormatError(f"frame {x.shape[1]}x{x.shape[0]} is smaller than the {win}px window")

    _, full = structural_similarity(
        x,
        y,
        win_size=win,
        K1=cfg.k1,
        K2=cfg.k2,
        data_range=cfg.data_range,
        use_sample_covariance=cfg.sample_covariance,
        gaussian_weights=False,
        full=True,
    )

    pad = (win - 1) // 2
    return full[pad:full.shape[0] - pad, pad:full.shape[1] - pad]


def ssim(a: Frame | np.ndarray, b: Frame | np.ndarray, cfg: SsimConfig | None = None) -> float:
    """Mean SSIM between two gray frames of equal size."""
    values = ssim_map(a, b, cfg).ravel(order="C")
    # row-major, strictly sequential accumulation
    return float(np.cumsum(values, dtype=np.float64)[-1] / values.size)


def ssim_to_reference(
    frames: Sequence[Frame],
    cfg: SsimConfig | None = None,
    threads: int | None = None,
) -> np.ndarray:
    """SSIM of every frame against ``frames[0]``; index 0 compares the reference with itself."""
    if not frames:
        return np.zeros(0, dtype=np.float64)
    cfg = (cfg or SsimConfig()).validate()
    reference = frames[0]
    scores = parallel_map(lambda frame: ssim(reference, frame, cfg), frames, threads)
    return np.asarray(scores, dtype=np.float64)
