"""Controlled degradations imitating tracker failure modes.

Static points get zero-mean Gaussian jitter; moving points drift away from
their query location by ``drift_rate * |t - e|`` along a seeded per-point
direction. The query frame of every point is left untouched.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from typing import Any

import numpy as np

from src.fpdtrack.errors import ConfigError
from src.fpdtrack.synth.rng import SplitMix64
from src.fpdtrack.tracks.models import TrackSet


@dataclass(frozen=True)
class DegradationSpec:
    """Noise model applied to a ground-truth track set (normalized units)."""
    jitter_sigma: float = 0.0
    drift_rate: float = 0.0
    visibility_flip_prob: float = 0.0
    seed: int = 0

    def validate(self) -> "DegradationSpec":
        if self.jitter_sigma < 0 or self.drift_rate < 0:
            raise ConfigError("jitter_sigma and drift_rate must be >= 0")
        if not 0.0 <= self.visibility_flip_prob < 1.0:
            raise ConfigError("visibility_flip_prob must lie in [0, 1)")
        return self

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def degrade_tracks(gt: TrackSet, static_flags: np.ndarray, spec: DegradationSpec) -> TrackSet:
    """Apply ``spec`` to ``gt``; ``static_flags`` marks the truly static points.

    The random stream is consumed in a fixed order (jitter normals, drift
    directions, flip uniforms) regardless of which parameters are zero.
    """
    spec.validate()
    static = np.asarray(static_flags, dtype=bool)
    if static.shape != (gt.num_points,):
        raise ConfigError(f"static flags cover {static.shape} points, tracks have {gt.num_points}")

    m, t = gt.num_points, gt.num_frames
    rng = SplitMix64(spec.seed)
    noise = rng.normal(m * t * 2).reshape(m, t, 2)
    angles = 2.0 * np.pi * rng.uniform(m)
    flips = rng.uniform(m * t).reshape(m, t) < spec.visibility_flip_prob

    at_query = np.zeros((m, t), dtype=bool)
    at_query[np.arange(m), gt.query_frames] = True

    offsets = np.zeros((m, t, 2), dtype=np.float64)
    jitter = np.where(at_query[:, :, None], 0.0, spec.jitter_sigma * noise)
    offsets[static] = jitter[static]

    steps = np.abs(np.arange(t)[None, :] - gt.query_frames[:, None]).astype(np.float64)
    direction = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    drift = spec.drift_rate * steps[:, :, None] * direction[:, None, :]
    offsets[~static] = drift[~static]

    coords = gt.coords + offsets
    visibility = gt.visibility ^ (flips & ~at_query)
    return replace(gt, coords=coords, visibility=visibility)
