"""Video frames: models, directory I/O and grayscale conversion."""

from src.fpdtrack.video.models import Frame, VideoSequence
from src.fpdtrack.video.io import (
    DEFAULT_FPS,
    LUMA_WEIGHTS,
    MANIFEST_NAME,
    list_frame_files,
    load_frame_sequence,
    save_frame_sequence,
    to_grayscale,
)

__all__ = [
    "Frame",
    "VideoSequence",
    "DEFAULT_FPS",
    "LUMA_WEIGHTS",
    "MANIFEST_NAME",
    "list_frame_files",
    "load_frame_sequence",
    "save_frame_sequence",
    "to_grayscale",
]
