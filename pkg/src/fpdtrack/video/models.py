"""Frame and video data models."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from src.fpdtrack.errors import FrameFormatError


@dataclass(frozen=True, eq=False)
class Frame:
    """A single image with intensities in [0, 1].

    ``pixels`` is (height, width) for gray or (height, width, channels).
    The array is copied to float64 and made read-only on construction.
    """
    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.pixels, dtype=np.float64, copy=True)
        if arr.ndim not in (2, 3) or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise FrameFormatError(f"frame must be HxW or HxWxC, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise FrameFormatError("frame contains non-finite pixel values")
        if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
            raise FrameFormatError("frame pixel values must lie in [0, 1]")
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def channels(self) -> int:
        return 1 if self.pixels.ndim == 2 else int(self.pixels.shape[2])

    @property
    def is_gray(self) -> bool:
        return self.pixels.ndim == 2

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and np.array_equal(self.pixels, other.pixels)

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=False)
class VideoSequence:
    """Ordered frames sharing one resolution."""
    frames: tuple[Frame, ...]
    fps: float = 30.0
    width: int = field(default=0)
    height: int = field(default=0)

    def __post_init__(self) -> None:
        frames = tuple(self.frames)
        if not frames:
            raise FrameFormatError("a video needs at least one frame")
        if not (self.fps > 0 and np.isfinite(self.fps)):
            raise FrameFormatError(f"fps must be positive, got {self.fps}")
        width = self.width or frames[0].width
        height = self.height or frames[0].height
        for index, frame in enumerate(frames):
            if frame.width != width or frame.height != height:
                raise FrameFormatError(
                    f"mixed dimensions: frame {index} is {frame.width}x{frame.height}, "
                    f"expected {width}x{height}"
                )
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "fps", float(self.fps))
        object.__setattr__(self, "width", int(width))
        object.__setattr__(self, "height", int(height))

    @property
    def num_frames(self) -> int:
        return len(self.frames)

    def __len__(self) -> int:
        return len(self.frames)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VideoSequence):
            return NotImplemented
        return (
            self.fps == other.fps
            and self.width == other.width
            and self.height == other.height
            and self.frames == other.frames
        )

    __hash__ = None  # type: ignore[assignment]

    def describe(self) -> dict[str, float | int]:
        """Metadata summary for reports."""
        return {
            "num_frames": self.num_frames,
            "fps": self.fps,
            "width": self.width,
            "height": self.height,
        }
