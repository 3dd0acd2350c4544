"""Synthetic scenes, ground truth and degraded track sources."""

from src.fpdtrack.synth.rng import SplitMix64, splitmix64_scalar
from src.fpdtrack.synth.degrade import DegradationSpec, degrade_tracks
from src.fpdtrack.synth.scene import (
    BlobSpec,
    CameraSpec,
    OcclusionSpec,
    SceneDocument,
    SceneSpec,
    SyntheticScene,
    generate_scene,
    make_texture,
)
from src.fpdtrack.synth.export import write_scene

__all__ = [
    "SplitMix64",
    "splitmix64_scalar",
    "DegradationSpec",
    "degrade_tracks",
    "BlobSpec",
    "CameraSpec",
    "OcclusionSpec",
    "SceneDocument",
    "SceneSpec",
    "SyntheticScene",
    "generate_scene",
    "make_texture",
    "write_scene",
]
