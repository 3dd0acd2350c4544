"""Camera- and point-level motion perception."""

from src.fpdtrack.perception.ssim import SsimConfig, ssim, ssim_map, ssim_to_reference
from src.fpdtrack.perception.mcmd import (
    CameraMotionResult,
    ClipResult,
    McmdConfig,
    SsimProfile,
    classify_profile,
    compute_ssim_profile,
    detect_camera_motion,
    dissimilar_fraction,
    moving_score,
    partition_clips,
)
from src.fpdtrack.perception.mpd import (
    MpdConfig,
    PointDeviations,
    PointMotionFlags,
    compute_deviations,
    detect_static_points,
    flags_from_deviations,
    point_deviation,
)

__all__ = [
    "SsimConfig",
    "ssim",
    "ssim_map",
    "ssim_to_reference",
    "CameraMotionResult",
    "ClipResult",
    "McmdConfig",
    "SsimProfile",
    "classify_profile",
    "compute_ssim_profile",
    "detect_camera_motion",
    "dissimilar_fraction",
    "moving_score",
    "partition_clips",
    "MpdConfig",
    "PointDeviations",
    "PointMotionFlags",
    "compute_deviations",
    "detect_static_points",
    "flags_from_deviations",
    "point_deviation",
]
