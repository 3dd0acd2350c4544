"""Write a synthetic scene and its degraded sources to disk."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Mapping

from src.fpdtrack.synth.degrade import DegradationSpec, degrade_tracks
from src.fpdtrack.synth.scene import SyntheticScene
from src.fpdtrack.tracks.io import save_tracks
from src.fpdtrack.video.io import save_frame_sequence

logger = logging.getLogger(__name__)

FRAMES_DIR = "frames"
GT_FILE = "gt.fpdt"
LABELS_FILE = "labels.json"


def write_scene(
    scene: SyntheticScene,
    out_dir: str | Path,
    degradations: Mapping[str, DegradationSpec] | None = None,
) -> dict[str, Path]:
    """Layout: frames/ (+ manifest.json), gt.fpdt, labels.json, degraded_<label>.fpdt."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: dict[str, Path] = {}

    save_frame_sequence(scene.video, out / FRAMES_DIR)
    written["frames"] = out / FRAMES_DIR
    written["gt"] = save_tracks(scene.ground_truth, out / GT_FILE, "binary")
    written["labels"] = scene.labels.save(out / LABELS_FILE)

    for label, spec in sorted((degradations or {}).items()):
        degraded = degrade_tracks(scene.ground_truth, scene.labels.static_points, spec).with_name(label)
        written[label] = save_tracks(degraded, out / f"degraded_{label}.fpdt", "binary")

    logger.info("Wrote scene (%d frames, %d points, %d degraded sources) to %s",
                scene.video.num_frames, scene.ground_truth.num_points, len(degradations or {}), out)
    return written
