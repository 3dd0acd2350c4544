"""Frame directory loading, saving and grayscale conversion.

Frames are read in lexicographic filename order, so numbered files must be
zero-padded (``frame_00000.png`` ...). An optional ``manifest.json`` carries
``fps``, ``width`` and ``height``; unknown keys are ignored.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from src.fpdtrack.errors import ConfigError, FrameFormatError
from src.fpdtrack.runtime import parallel_map
from src.fpdtrack.video.models import Frame, VideoSequence

logger = logging.getLogger(__name__)

FRAME_SUFFIXES = (".png", ".ppm")
MANIFEST_NAME = "manifest.json"
DEFAULT_FPS = 30.0

# Rec. 709 luma
LUMA_WEIGHTS = np.array([0.2126, 0.7152, 0.0722], dtype=np.float64)


def to_grayscale(frame: Frame) -> Frame:
    """Convert an RGB frame to single-channel luma.

    Gray frames are returned unchanged, which keeps the conversion idempotent.
    """
    if frame.is_gray:
        return frame
    if frame.channels == 1:
        return Frame(frame.pixels[:, :, 0])
    if frame.channels != 3:
        raise FrameFormatError(f"cannot convert a {frame.channels}-channel frame to grayscale")
    gray = frame.pixels @ LUMA_WEIGHTS
    return Frame(np.clip(gray, 0.0, 1.0))


def _decode(path: Path) -> Frame:
    try:
        with Image.open(path) as image:
            image.load()
            if image.mode in ("L", "1"):
                arr = np.asarray(image.convert("L"), dtype=np.float64) / 255.0
            elif image.mode in ("I;16", "I;16B", "I;16L"):
                arr = np.asarray(image, dtype=np.float64) / 65535.0
            else:
                arr = np.asarray(image.convert("RGB"), dtype=np.float64) / 255.0
    except (UnidentifiedImageError, OSError, SyntaxError) as e:
        raise FrameFormatError(f"cannot decode frame {path.name}: {e}") from e
    return Frame(arr)


def _read_manifest(path: Path) -> dict:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"unreadable manifest {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"manifest {path} must be a JSON object")
    return data


def list_frame_files(dir_path: str | Path) -> list[Path]:
    """Frame files in temporal (lexicographic) order."""
    directory = Path(dir_path)
    if not directory.is_dir():
        raise FrameFormatError(f"frame directory not found: {directory}")
    return sorted(
        (p for p in directory.iterdir() if p.is_file() and p.suffix.lower() in FRAME_SUFFIXES),
        key=lambda p: p.name,
    )


def load_frame_sequence(
    dir_path: str | Path,
    manifest: str | Path | None = None,
    *,
    default_fps: float = DEFAULT_FPS,
    threads: int | None = None,
) -> VideoSequence:
    """Load every PNG/PPM frame in ``dir_path`` as a VideoSequence.

    Args:
        dir_path: Directory holding the frames.
        manifest: Optional manifest path; ``dir_path/manifest.json`` is used
            when omitted and present.
        default_fps: Frame rate used when the manifest gives none.
        threads: Decoder worker cap (None defers to FPD_THREADS).
    """
    directory = Path(dir_path)
    files = list_frame_files(directory)
    if not files:
        raise FrameFormatError(f"empty frame directory: {directory}")

    meta: dict = {}
    manifest_path = Path(manifest) if manifest is not None else directory / MANIFEST_NAME
    if manifest is not None or manifest_path.exists():
        meta = _read_manifest(manifest_path)

    fps = meta.get("fps", default_fps)
    if not isinstance(fps, (int, float)) or isinstance(fps, bool) or not fps > 0:
        raise ConfigError(f"manifest fps must be a positive number, got {fps!r}")

    frames = parallel_map(_decode, files, threads)
    first = frames[0]
    for key, actual in (("width", first.width), ("height", first.height)):
        expected = meta.get(key)
        if expected is None:
            continue
        if not isinstance(expected, int) or isinstance(expected, bool):
            raise ConfigError(f"manifest {key} must be an integer, got {expected!r}")
        if expected != actual:
            raise FrameFormatError(f"manifest {key}={expected} but frames are {actual}")

    video = VideoSequence(tuple(frames), fps=float(fps))
    logger.debug("Loaded %d frames (%dx%d @ %.3g fps) from %s",
                 video.num_frames, video.width, video.height, video.fps, directory)
    return video


def save_frame_sequence(video: VideoSequence, dir_path: str | Path, prefix: str = "frame") -> list[Path]:
    """Write frames as 8-bit PNGs plus a manifest; returns the frame paths."""
    directory = Path(dir_path)
    digits = max(5, len(str(video.num_frames - 1)))
    paths = []
    try:
        directory.mkdir(parents=True, exist_ok=True)
        for index, frame in enumerate(video.frames):
            data = np.rint(frame.pixels * 255.0).astype(np.uint8)
            path = directory / f"{prefix}_{index:0{digits}d}.png"
            Image.fromarray(data).save(path, format="PNG")
            paths.append(path)
        manifest = {"fps": video.fps, "width": video.width, "height": video.height}
        (directory / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot write frames to {directory}: {e}") from e
    return paths
