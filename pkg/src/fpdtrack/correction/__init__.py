"""Dynamic trajectory correction across track sources."""

from src.fpdtrack.correction.dtc import (
    FusionPolicy,
    check_sources,
    fuse,
    fuse_with_flags,
    stabilize_static_track,
)

__all__ = [
    "FusionPolicy",
    "check_sources",
    "fuse",
    "fuse_with_flags",
    "stabilize_static_track",
]
