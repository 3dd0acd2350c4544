"""Point-track model and file formats."""

from src.fpdtrack.tracks.models import QueryPoint, TrackSet
from src.fpdtrack.tracks.io import (
    binary_size,
    infer_format,
    load_tracks,
    save_tracks,
    tracks_to_bytes,
    tracks_to_json,
)

__all__ = [
    "QueryPoint",
    "TrackSet",
    "binary_size",
    "infer_format",
    "load_tracks",
    "save_tracks",
    "tracks_to_bytes",
    "tracks_to_json",
]
